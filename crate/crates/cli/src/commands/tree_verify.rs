use fanin_core::fanin::{activity_result, BiasPoint};
use fanin_core::inductance::CollectionLoopDesign;
use fanin_core::squid::SquidParams;
use fanin_core::tree::{
    build_tree, min_active_synapses, propagate_binary, propagate_dynamical, DendriticTree, DynamicalConfig, MinActive,
    SearchMode, SynapseState, TreeSnapshot,
};
use fanin_core::Error;
use serde_json::{json, Value};

use crate::args::{TreeVerifyArgs, VerifyMode};
use crate::error::{CliError, CliResult, DISAGREEMENT};
use crate::output::{json_num, Emitter};

pub fn run(a: &TreeVerifyArgs, out: &Emitter) -> CliResult {
    let tree = build_tree(a.n, a.h, a.bias)?;
    let activity = activity_result(BiasPoint::new(a.bias)?, a.n);
    let p = activity.p_integer;
    let p_analytic = p.map(|p| p.pow(a.h));

    let mut report = json!({
        "version": fanin_core::VERSION,
        "invocation": out.invocation,
        "n": a.n,
        "H": a.h,
        "bias_ratio": json_num(a.bias),
        "activity_fraction": json_num(activity.fraction_continuous),
        "reachable": activity.reachable,
        "p": p,
        "P_analytic": p_analytic,
    });
    let fields = report.as_object_mut().expect("object literal");

    let agree = match a.mode {
        VerifyMode::Exhaustive => {
            fields.insert("mode".into(), json!("exhaustive"));
            let found = search(&tree, SearchMode::Exhaustive)?;
            let count = found.as_ref().map(|m| m.count as u64);
            fields.insert("P_bruteforce".into(), json!(count));
            fields.insert("witness".into(), json!(found.as_ref().map(|m| &m.witness)));
            snapshot(a, fields, &tree, found.as_ref())?;
            count == p_analytic
        }
        VerifyMode::Constructive => {
            fields.insert("mode".into(), json!("constructive"));
            let found = search(&tree, SearchMode::Constructive)?;
            let fires = match &found {
                Some(m) => propagate_binary(&tree, &m.witness)?.soma_fired,
                None => false,
            };
            fields.insert("P_constructive".into(), json!(found.as_ref().map(|m| m.count)));
            fields.insert("witness".into(), json!(found.as_ref().map(|m| &m.witness)));
            fields.insert("witness_fires".into(), json!(fires));
            snapshot(a, fields, &tree, found.as_ref())?;
            found.as_ref().map(|m| m.count as u64) == p_analytic && (found.is_none() || fires)
        }
        VerifyMode::Dynamical => {
            fields.insert("mode".into(), json!("dynamical"));
            dynamical(a, fields, &tree)?
        }
    };
    fields.insert("agree".into(), json!(agree));
    out.json(&report)?;
    if agree {
        Ok(())
    } else {
        Err(CliError {
            code: DISAGREEMENT,
            message: "analytic and verified minimum activity disagree".into(),
        })
    }
}

/// `None` when the bias is too low for any subset to fire the soma.
fn search(tree: &DendriticTree<f64>, mode: SearchMode) -> CliResult<Option<MinActive>> {
    match min_active_synapses(tree, mode) {
        Ok(m) => Ok(Some(m)),
        Err(Error::Unreachable { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn snapshot(
    a: &TreeVerifyArgs,
    fields: &mut serde_json::Map<String, Value>,
    tree: &DendriticTree<f64>,
    found: Option<&MinActive>,
) -> CliResult {
    if a.snapshot {
        let active = found.map_or(&[][..], |m| &m.witness[..]);
        let r = propagate_binary(tree, active)?;
        fields.insert("snapshot".into(), snapshot_json(&TreeSnapshot::binary(tree, &r)));
    }
    Ok(())
}

fn snapshot_json(s: &TreeSnapshot) -> Value {
    let mut v = serde_json::to_value(s).expect("snapshot serializes");
    round_floats(&mut v);
    v
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => *v = json_num(n.as_f64().expect("f64")),
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Drives the constructive witness, every leaf and no leaf through the
/// simulated tree and compares each soma outcome with the binary cascade.
fn dynamical(
    a: &TreeVerifyArgs,
    fields: &mut serde_json::Map<String, Value>,
    tree: &DendriticTree<f64>,
) -> CliResult<bool> {
    let design = CollectionLoopDesign::reference(a.n)?;
    let squid = SquidParams::beta_l_one(design.ic, a.bias)?;
    let cfg = DynamicalConfig::default();
    let i_sat = design.i_sat();
    let leaves = tree.leaf_count();
    let witness = search(tree, SearchMode::Constructive)?.map(|m| m.witness);

    let mut cases: Vec<(&str, Vec<usize>)> = vec![("all_saturated", (0..leaves).collect()), ("all_silent", vec![])];
    if let Some(w) = &witness {
        cases.insert(0, ("witness", w.clone()));
    }
    fields.insert("witness".into(), json!(witness));

    let mut agree = true;
    let mut gain = 0.0;
    for (name, active) in cases {
        let mut currents = vec![0.0; leaves];
        for &leaf in &active {
            currents[leaf] = i_sat;
        }
        let state = SynapseState::analog(currents, i_sat)?;
        let dyn_result = propagate_dynamical(tree, &state, &design, &squid, &cfg)?;
        let binary = propagate_binary(tree, &active)?.soma_fired;
        let same = binary == dyn_result.propagation.soma_fired;
        agree &= same;
        gain = dyn_result.gain;
        let mut entry = json!({
            "soma_fired_binary": binary,
            "soma_fired_dynamical": dyn_result.propagation.soma_fired,
            "soma_r_fq": json_num(dyn_result.r_fq[0]),
            "soma_applied_flux": json_num(dyn_result.propagation.applied_flux[0]),
            "agree": same,
        });
        if a.snapshot {
            entry["snapshot"] = snapshot_json(&TreeSnapshot::dynamical(tree, &dyn_result));
        }
        fields.insert(name.into(), entry);
    }
    fields.insert("gain_A_per_rate".into(), json_num(gain));
    Ok(agree)
}
