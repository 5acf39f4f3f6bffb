use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use log::info;
use serde_json::json;

use fbpme::io::{write_fbpm_file, write_trajectory_csv};
use fbpme::solver::{picard_solve, semigroup_apply, time_march, RunStatus};
use fbpme::wellposedness::{admissible, blowup_monitor};
use fbpme::{build_partition, fb_norm, Exponent, SolverConfig, SpectralField, TrajectoryRecord};

use crate::config::{Method, RunConfig};
use crate::init::initial_field;
use crate::output::{json_f64, write_atomic};

pub struct RunSummary {
    pub status: String,
    pub monitor: String,
}

pub fn cmd_run(config_path: &Path) -> Result<RunSummary> {
    let (cfg, base) = RunConfig::load(config_path)?;
    let res = cfg.resolve(&base)?;
    let grid = res.grid;
    let params = &res.params;
    let partition = build_partition(&grid)?;
    let u0 = initial_field(&cfg.initial_data, grid, &base)?;
    let dt = res.solver.dt.unwrap_or_else(|| SolverConfig::default_dt(&grid, params.alpha()));
    info!("running {:?} on n={} N={} to T={}", cfg.solver.method, grid.dim(), grid.points(), res.solver.horizon);

    let (record, final_field, final_time, status, snapshots, mut method_meta): (
        TrajectoryRecord,
        SpectralField,
        f64,
        RunStatus,
        Vec<(f64, SpectralField)>,
        serde_json::Value,
    ) = match cfg.solver.method {
        Method::March => {
            let out = time_march(&u0, params, &res.solver)?;
            let meta = json!({ "steps": out.steps, "dt": dt });
            (out.record, out.final_field, out.final_time, out.status, out.snapshots, meta)
        }
        Method::Picard => {
            let out = picard_solve(&u0, params, &res.solver)?;
            let traj = &out.trajectory;
            let snaps = res
                .solver
                .snapshots
                .iter()
                .map(|&t| {
                    let i = traj
                        .times
                        .iter()
                        .enumerate()
                        .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                        .map(|(i, _)| i)
                        .expect("trajectory is never empty");
                    (traj.times[i], traj.fields[i].clone())
                })
                .collect();
            let meta = json!({
                "picard_status": format!("{:?}", out.status),
                "iterations": out.iterations,
                "ratios": out.ratios.iter().map(|&r| json_f64(r)).collect::<Vec<_>>(),
                "increments": out.increments.iter().map(|&r| json_f64(r)).collect::<Vec<_>>(),
                "x_norm": json_f64(out.x_norm),
                "linear_x_norm": json_f64(out.linear_x_norm),
                "nodes": res.solver.picard_nodes,
            });
            let t = *traj.times.last().expect("trajectory is never empty");
            (out.record.clone(), out.final_field().clone(), t, RunStatus::Completed, snaps, meta)
        }
    };

    let monitor = blowup_monitor(&record, params, status.is_blown())?;
    fs::create_dir_all(&res.output_dir).with_context(|| format!("creating {}", res.output_dir.display()))?;
    let mut csv = Vec::new();
    write_trajectory_csv(&record, &mut csv)?;
    write_atomic(&res.output_dir.join("trajectory.csv"), &csv)?;

    let snap_dir = res.output_dir.join("snapshots");
    let mut snap_meta = Vec::new();
    if !snapshots.is_empty() {
        fs::create_dir_all(&snap_dir)?;
    }
    for (i, (t, u)) in snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:04}.fbpm");
        write_fbpm_file(u, &snap_dir.join(&name))?;
        snap_meta.push(json!({ "file": format!("snapshots/{name}"), "t": t }));
    }

    if !cfg.solver.nonlinear {
        // the linear flow has a closed form
        let exact = semigroup_apply(&u0, final_time, params.alpha())?;
        let err = final_field.sub(&exact).l2_norm() / exact.l2_norm().max(f64::MIN_POSITIVE);
        method_meta["linear_check_rel_l2"] = json_f64(err);
    }

    let report = admissible(grid.dim(), params.p(), params.alpha(), params.sigma(), Exponent::TWO);
    let (blown_time, reason) = match &status {
        RunStatus::Blown { time, reason } => (Some(*time), Some(reason.clone())),
        RunStatus::Completed => (None, None),
    };
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "grid": {
            "dxi": grid.dxi(),
            "dx": grid.dx(),
            "j_min": partition.j_min(),
            "j_max": partition.j_max(),
        },
        "model": {
            "sigma": params.sigma(),
            "beta": report.beta,
            "admissible_r2": report.admissible_r2,
            "range_r2": [report.range_r2.lower, report.range_r2.upper],
            "admissible_improved": report.admissible_improved,
            "range_improved": [report.range_improved.lower, report.range_improved.upper],
            "rationale": report.rationale,
        },
        "initial_norm": json_f64(fb_norm(&u0, params.data_norm(), &partition)),
        "final_norm": json_f64(fb_norm(&final_field, params.data_norm(), &partition)),
        "final_time": final_time,
        "status": status.label(),
        "blowup_time": blown_time,
        "blowup_reason": reason,
        "monitor": monitor.status.label(),
        "blowup_integral": json_f64(monitor.total()),
        "method": method_meta,
        "snapshots": snap_meta,
    });
    write_atomic(&res.output_dir.join("metadata.json"), serde_json::to_string_pretty(&meta)?.as_bytes())?;
    Ok(RunSummary { status: status.label().to_string(), monitor: monitor.status.label().to_string() })
}
