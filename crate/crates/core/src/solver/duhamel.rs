use crate::error::{Error, Result};
use crate::record::FieldTrajectory;
use crate::spectral::SpectralField;

use super::operators::{phi1, phi2, Operators};
use super::ModelParams;

/// Quadrature for `∫ e^{-(t-τ)Λ^α} f(τ) dτ` between stored nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuhamelRule {
    /// Trapezoid in τ with the semigroup applied exactly at each node.
    Trapezoid,
    /// `f` linear between nodes, integrated exactly against the semigroup.
    Exponential,
}

/// `∫_0^{t_i} e^{-(t_i-τ)Λ^α} f(τ) dτ` at every node `t_i` of `forcing` (zero at the first).
pub fn duhamel_forcing(forcing: &FieldTrajectory, alpha: f64, rule: DuhamelRule) -> Result<Vec<SpectralField>> {
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let grid = forcing.fields[0].grid;
    if forcing.times[0] != 0.0 {
        return Err(Error::Quadrature("forcing trajectory must start at t = 0".into()));
    }
    let lam: Vec<f64> = grid
        .xi_norms()
        .into_iter()
        .map(|r| if r == 0.0 { 0.0 } else { r.powf(alpha) })
        .collect();
    let mut out = Vec::with_capacity(forcing.len());
    let mut h = SpectralField::zeros(grid);
    out.push(h.clone());
    for i in 0..forcing.len() - 1 {
        let dt = forcing.times[i + 1] - forcing.times[i];
        let (f0, f1) = (&forcing.fields[i].coeffs, &forcing.fields[i + 1].coeffs);
        for (m, c) in h.coeffs.iter_mut().enumerate() {
            let z = -dt * lam[m];
            let e = z.exp();
            *c = match rule {
                DuhamelRule::Trapezoid => e * *c + 0.5 * dt * (e * f0[m] + f1[m]),
                DuhamelRule::Exponential => {
                    let (a, b) = (phi1(z), phi2(z));
                    e * *c + dt * ((a - b) * f0[m] + b * f1[m])
                }
            };
        }
        out.push(h.clone());
    }
    Ok(out)
}

/// `H(u,v)(t) = ∫_0^t e^{-(t-τ)Λ^α} ∇·(u(τ)∇Pv(τ)) dτ`; `t` must be one of the shared nodes.
pub fn duhamel(
    u_traj: &FieldTrajectory,
    v_traj: &FieldTrajectory,
    t: f64,
    params: &ModelParams,
    rule: DuhamelRule,
) -> Result<SpectralField> {
    if u_traj.times != v_traj.times {
        return Err(Error::Quadrature("trajectories must share time nodes".into()));
    }
    let tol = 1e-12 * t.abs().max(1.0);
    let last = *u_traj.times.last().expect("non-empty trajectory");
    if t > last + tol {
        return Err(Error::Quadrature(format!("nodes end at {last}, cannot reach t = {t}")));
    }
    let idx = u_traj
        .times
        .iter()
        .position(|&s| (s - t).abs() <= tol)
        .ok_or_else(|| Error::Quadrature(format!("t = {t} is not a stored node")))?;
    let ops = Operators::new(u_traj.fields[0].grid, params)?;
    let forcing = (0..=idx)
        .map(|i| ops.bilinear(&u_traj.fields[i], &v_traj.fields[i]))
        .collect::<Result<Vec<_>>>()?;
    let f = FieldTrajectory::new(u_traj.times[..=idx].to_vec(), forcing)?;
    Ok(duhamel_forcing(&f, params.alpha(), rule)?.pop().expect("non-empty"))
}
