use std::path::PathBuf;

use fanin_core::constants::PHI0;
use fanin_core::inductance::{
    applied_flux_collection, crosstalk_current, design_ldi2_collection, design_no_collection, feasibility,
    ldi2_collection_asymptote, sfq_consistency, sfq_coupling, sfq_inductance, vary_ic_no_collection, washer_segment,
    CollectionLoopDesign, DesignConfig, FeasibilityWarning, NoCollectionDesign, CONSTRAINT_RTOL,
    MIN_FABRICABLE_INDUCTANCE,
};
use serde_json::{json, Value};

use crate::args::{DesignArgs, DesignMode};
use crate::error::{CliError, CliResult};
use crate::output::{json_bytes, json_num, write_file, Cell, Emitter, Table};

const PICO: f64 = 1e12;
const MICRO: f64 = 1e6;
/// Flux cap used by the no-collection family, in `Φ0`.
const PHI_MAX: f64 = 0.5;

struct Warning {
    n: u64,
    inner: FeasibilityWarning,
}

pub fn run(a: &DesignArgs, out: &Emitter) -> CliResult {
    if a.n.0.is_empty() || a.n.0.contains(&0) {
        return Err(CliError::usage("fan-in values must be at least 1"));
    }
    if a.l_di2_ph.is_some() && a.mode != DesignMode::Collection {
        return Err(CliError::usage("--l-di2-ph applies to collection mode only"));
    }
    let config = load_config(a)?;
    let mut warnings = Vec::new();
    let mut extra = serde_json::Map::new();

    let table = match a.mode {
        DesignMode::Collection => {
            let base = collection_base(a, &config)?;
            extra.insert("sfq_level_pH".into(), json_num(sfq_inductance(base.ic) * PICO));
            collection(a, base, &mut warnings)?
        }
        DesignMode::NoCollection => no_collection(a, no_collection_base(a, &config)?, &mut warnings)?,
        DesignMode::Sfq => {
            let base = no_collection_base(a, &config)?;
            extra.insert("sfq_level_pH".into(), json_num(sfq_inductance(base.ic_dr) * PICO));
            extra.insert("sfq_consistency".into(), consistency(&a.n.0, base)?);
            sfq(a, base, &mut warnings)?
        }
        DesignMode::VaryIc => {
            let base = no_collection_base(a, &config)?;
            extra.insert("sfq_consistency".into(), consistency(&a.n.0, base)?);
            vary_ic(a, base, &mut warnings)?
        }
    };

    let mut report = json!({
        "version": fanin_core::VERSION,
        "invocation": out.invocation,
        "mode": mode_name(a.mode),
        "fabrication_limit_pH": json_num(MIN_FABRICABLE_INDUCTANCE * PICO),
        "warnings": warnings
            .iter()
            .map(|w| json!({ "n": w.n, "l_di2_pH": json_num(w.inner.l_di2 * PICO), "message": w.inner.message }))
            .collect::<Vec<_>>(),
    });
    if let Value::Object(map) = &mut report {
        map.extend(extra);
    }
    write_report(a, out, &report)?;
    out.table(&table, json!({ "report": report }))
}

fn mode_name(m: DesignMode) -> &'static str {
    match m {
        DesignMode::Collection => "collection",
        DesignMode::NoCollection => "no_collection",
        DesignMode::Sfq => "sfq",
        DesignMode::VaryIc => "vary_ic",
    }
}

fn load_config(a: &DesignArgs) -> CliResult<Option<DesignConfig<f64>>> {
    let Some(path) = &a.design_file else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let config: DesignConfig<f64> =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(Some(config))
}

fn collection_base(a: &DesignArgs, config: &Option<DesignConfig<f64>>) -> CliResult<CollectionLoopDesign<f64>> {
    let mut d = match config.as_ref().and_then(|c| c.collection) {
        Some(d) => d,
        None => CollectionLoopDesign::reference(2)?,
    };
    if let Some(k) = a.k {
        d.k1 = k;
        d.k2 = k;
    }
    if let Some(ic) = a.ic_ua {
        d.ic = ic / MICRO;
    }
    if let Some(l) = a.l_dc1_ph {
        d.l_dc1 = l / PICO;
    }
    if let Some(l) = a.l_dc3_ph {
        d.l_dc3 = l / PICO;
    }
    if let Some(alpha) = a.alpha {
        d.alpha = alpha;
    }
    if let Some(gamma) = a.gamma {
        d.gamma = gamma;
    }
    d.validate_inputs()?;
    Ok(d)
}

fn no_collection_base(a: &DesignArgs, config: &Option<DesignConfig<f64>>) -> CliResult<NoCollectionDesign<f64>> {
    let mut d = match config.as_ref().and_then(|c| c.no_collection) {
        Some(d) => d,
        None => NoCollectionDesign::shared_ic(2, 0.5, 300e-6)?,
    };
    if let Some(k) = a.k {
        d.k = k;
    }
    if let Some(ic) = a.ic_ua {
        d.ic_dr = ic / MICRO;
        d.ic_di = ic / MICRO;
    }
    if let Some(ic) = a.ic_di_ua {
        d.ic_di = ic / MICRO;
    }
    d.sfq_mode |= a.sfq;
    d.validate()?;
    Ok(d)
}

/// Applied flux in `Φ0` when `n` saturated DI loops couple straight into
/// their washer segments.
fn direct_flux(n: u64, k: f64, l_di2: f64, l_dr1: f64, i_sat: f64) -> f64 {
    n as f64 * k * (l_di2 * l_dr1).sqrt() * i_sat / PHI0
}

fn check_round_trip(n: u64, flux: f64, phi_max: f64) -> CliResult {
    if ((flux - phi_max) / phi_max).abs() > CONSTRAINT_RTOL {
        return Err(CliError::constraint(format!(
            "round-trip check failed at n = {n}: all-saturated flux {flux} Φ0, expected {phi_max} Φ0"
        )));
    }
    Ok(())
}

fn note(warnings: &mut Vec<Warning>, n: u64, l_di2: f64) -> bool {
    match feasibility(l_di2) {
        Some(inner) => {
            warnings.push(Warning { n, inner });
            true
        }
        None => false,
    }
}

fn collection(a: &DesignArgs, base: CollectionLoopDesign<f64>, warnings: &mut Vec<Warning>) -> CliResult<Table> {
    let mut table = Table::new(&[
        "n",
        "l_di2_pH",
        "l_di2_asymptote_pH",
        "sfq_level_pH",
        "crosstalk_per_input_uA",
        "below_fab_limit",
    ]);
    for &n in &a.n.0 {
        let mut d = CollectionLoopDesign { n, ..base };
        d.l_di2 = match a.l_di2_ph {
            Some(l) if l.is_finite() && l > 0.0 => l / PICO,
            Some(l) => return Err(CliError::usage(format!("--l-di2-ph must be positive, got {l}"))),
            None => design_ldi2_collection(&d)?,
        };
        let saturated = vec![d.i_sat(); n as usize];
        check_round_trip(n, applied_flux_collection(&d, &saturated)?, d.phi_max)?;
        let flagged = note(warnings, n, d.l_di2);
        table.push(vec![
            Cell::Int(n),
            Cell::Num(d.l_di2 * PICO),
            Cell::Num(ldi2_collection_asymptote(&d)? * PICO),
            Cell::Num(sfq_inductance(d.ic) * PICO),
            Cell::Num(crosstalk_current(&d, 1)? * MICRO),
            Cell::Bool(flagged),
        ]);
    }
    Ok(table)
}

fn no_collection(a: &DesignArgs, base: NoCollectionDesign<f64>, warnings: &mut Vec<Warning>) -> CliResult<Table> {
    let mut table = Table::new(&["n", "k", "l_dr1_pH", "l_di2_pH", "below_fab_limit"]);
    for &n in &a.n.0 {
        let d = NoCollectionDesign {
            n,
            l_dr1: washer_segment(n, base.ic_dr)?,
            ..base
        };
        let l = design_no_collection(&d, PHI_MAX)?;
        check_round_trip(n, direct_flux(n, d.k, l, d.l_dr1, d.ic_di), PHI_MAX)?;
        let flagged = note(warnings, n, l);
        table.push(vec![
            Cell::Int(n),
            Cell::Num(d.k),
            Cell::Num(d.l_dr1 * PICO),
            Cell::Num(l * PICO),
            Cell::Bool(flagged),
        ]);
    }
    Ok(table)
}

fn sfq(a: &DesignArgs, base: NoCollectionDesign<f64>, warnings: &mut Vec<Warning>) -> CliResult<Table> {
    let mut table = Table::new(&["n", "k", "l_di2_pH", "sfq_level_pH", "below_fab_limit"]);
    let ic = base.ic_dr;
    for &n in &a.n.0 {
        let k = sfq_coupling(n)?;
        let d = NoCollectionDesign::shared_ic(n, k, ic)?;
        let l = design_no_collection(&d, PHI_MAX)?;
        check_round_trip(n, direct_flux(n, k, l, d.l_dr1, ic), PHI_MAX)?;
        let level = sfq_inductance(ic);
        if ((l - level) / level).abs() > CONSTRAINT_RTOL {
            return Err(CliError::constraint(format!(
                "SFQ coupling at n = {n} gives {} pH, expected {} pH",
                l * PICO,
                level * PICO
            )));
        }
        let flagged = note(warnings, n, l);
        table.push(vec![
            Cell::Int(n),
            Cell::Num(k),
            Cell::Num(l * PICO),
            Cell::Num(level * PICO),
            Cell::Bool(flagged),
        ]);
    }
    Ok(table)
}

fn vary_ic(a: &DesignArgs, base: NoCollectionDesign<f64>, warnings: &mut Vec<Warning>) -> CliResult<Table> {
    let mut table = Table::new(&[
        "n",
        "k",
        "ic_dr_uA",
        "ic_di_uA",
        "l_di2_pH",
        "applied_flux_phi0",
        "below_fab_limit",
    ]);
    for &n in &a.n.0 {
        let d = NoCollectionDesign {
            n,
            l_dr1: washer_segment(n, base.ic_dr)?,
            ..base
        };
        let r = vary_ic_no_collection(&d)?;
        let flux = direct_flux(n, d.k, r.l_di2, d.l_dr1, r.ic_di);
        // The single-quantum input rule is kept as stated and does not
        // meet the cap; its mismatch is reported, not enforced.
        if !d.sfq_mode {
            check_round_trip(n, flux, PHI_MAX)?;
        }
        let flagged = note(warnings, n, r.l_di2);
        table.push(vec![
            Cell::Int(n),
            Cell::Num(d.k),
            Cell::Num(d.ic_dr * MICRO),
            Cell::Num(r.ic_di * MICRO),
            Cell::Num(r.l_di2 * PICO),
            Cell::Num(flux),
            Cell::Bool(flagged),
        ]);
    }
    Ok(table)
}

fn consistency(ns: &[u64], base: NoCollectionDesign<f64>) -> CliResult<Value> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let c = sfq_consistency(n, base.k, base.ic_dr)?;
        rows.push(json!({
            "n": n,
            "k": json_num(c.k),
            "ic_di_stated_uA": json_num(c.ic_di_stated * MICRO),
            "ic_di_consistent_uA": json_num(c.ic_di_consistent * MICRO),
            "ratio": json_num(c.ratio),
            "l_di2_constraint_at_stated_pH": json_num(c.l_di2_constraint_at_stated * PICO),
            "l_di2_sfq_at_stated_pH": json_num(c.l_di2_sfq_at_stated * PICO),
            "consistent": c.consistent,
        }));
    }
    Ok(json!({
        "note": "single-quantum input rule Ic_di = Ic_dr/(n k^2) versus Ic_dr/(2 n k^2) implied by the flux cap",
        "rows": rows,
    }))
}

fn report_path(a: &DesignArgs, out: &Emitter) -> Option<PathBuf> {
    a.report.clone().or_else(|| {
        out.output.as_ref().map(|p| {
            let mut s = p.as_os_str().to_owned();
            s.push(".report.json");
            PathBuf::from(s)
        })
    })
}

fn write_report(a: &DesignArgs, out: &Emitter, report: &Value) -> CliResult {
    match report_path(a, out) {
        Some(path) => write_file(&path, &json_bytes(report)?),
        None => {
            let count = report["warnings"].as_array().map_or(0, Vec::len);
            if count > 0 {
                eprintln!("fanin: {count} feasibility warning(s); pass --report to save them");
            }
            Ok(())
        }
    }
}
