use fanin_core::squid::{sweep_response, SimConfig, SquidParams};
use serde_json::json;

use crate::args::ResponseArgs;
use crate::error::{CliError, CliResult};
use crate::output::{json_num, Cell, Emitter, Table};

pub fn run(a: &ResponseArgs, out: &Emitter) -> CliResult {
    if a.bias.is_empty() {
        return Err(CliError::usage("no bias values given"));
    }
    let mut biases = a.bias.clone();
    biases.sort_by(f64::total_cmp);
    biases.dedup();

    let cfg = SimConfig::default();
    let mut table = Table::new(&["bias_ratio", "phi_over_phi0", "r_fq_normalized"]);
    let mut thresholds = Vec::new();
    for &bias in &biases {
        let params = SquidParams {
            beta_c: a.beta_c,
            ..SquidParams::beta_l_one(a.ic_ua * 1e-6, bias)?
        };
        params.validate()?;
        let curve = sweep_response(&params, a.range.0, a.range.1, a.points, &cfg)?;
        for &(phi, r) in &curve.samples {
            table.push(vec![Cell::Num(bias), Cell::Num(phi), Cell::Num(r)]);
        }
        thresholds.push(json!({
            "bias_ratio": json_num(bias),
            "first_active_flux": curve.first_active_flux().map(json_num),
            "max_rate": json_num(curve.max_rate()),
        }));
    }
    out.table(
        &table,
        json!({ "ic_ua": json_num(a.ic_ua), "beta_l": 1.0, "beta_c": json_num(a.beta_c), "curves": thresholds }),
    )
}
