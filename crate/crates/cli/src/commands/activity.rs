use fanin_core::fanin::{activity_result, point_activity_fraction, tree_activity_fraction, BiasPoint, TreeTopology};
use serde_json::json;

use crate::args::ActivityArgs;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Emitter, Table};

pub fn run(a: &ActivityArgs, out: &Emitter) -> CliResult {
    let biases = match &a.bias {
        Some(list) => list.clone(),
        None => grid(a.bias_range, a.points)?,
    };
    if biases.is_empty() || a.depths.is_empty() {
        return Err(CliError::usage("need at least one bias and one depth"));
    }
    let mut columns = vec!["bias_ratio", "H", "activity_fraction", "unreachable"];
    if a.integer {
        columns.extend(["fan_in", "p_integer", "P_integer"]);
    }
    let mut table = Table::new(&columns);
    for &b in &biases {
        let bias = BiasPoint::new(b)?;
        for &h in &a.depths {
            // Validates the depth and, in integer mode, that n^H fits.
            let topo = TreeTopology::new(a.fan_in.unwrap_or(1), h)?;
            let f = point_activity_fraction(bias);
            let unreachable = f > 1.0;
            let mut row = vec![Cell::Num(b), Cell::Int(u64::from(h))];
            if a.integer {
                let n = topo.n();
                match activity_result(bias, n).p_integer {
                    Some(p) => {
                        let big_p = p.pow(h);
                        let fraction = big_p as f64 / topo.n_synapses() as f64;
                        row.extend([
                            Cell::Num(fraction),
                            Cell::Bool(false),
                            Cell::Int(n),
                            Cell::Int(p),
                            Cell::Int(big_p),
                        ]);
                    }
                    None => row.extend([
                        Cell::Num(tree_activity_fraction(bias, h)),
                        Cell::Bool(true),
                        Cell::Int(n),
                        Cell::Empty,
                        Cell::Empty,
                    ]),
                }
            } else {
                row.extend([Cell::Num(tree_activity_fraction(bias, h)), Cell::Bool(unreachable)]);
            }
            table.push(row);
        }
    }
    out.table(&table, json!({ "integer_mode": a.integer }))
}

/// `points` evenly spaced values on `[lo, hi]`.
fn grid((lo, hi): (f64, f64), points: usize) -> CliResult<Vec<f64>> {
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
        return Err(CliError::usage(format!("bias range {lo}:{hi} must lie within [0, 1]")));
    }
    match points {
        0 => Err(CliError::usage("need at least one point")),
        1 => Ok(vec![lo]),
        _ => Ok((0..points)
            .map(|i| {
                if i + 1 == points {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (points - 1) as f64
                }
            })
            .collect()),
    }
}
