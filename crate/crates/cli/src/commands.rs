//! The three batch commands. Each returns its CSV text; files are written by
//! the caller.

use sl2_core::{
    epsilon_profile, oracles, potential_gradient, scan, schrodinger, Cocycle, CocycleMap, Frequency,
};

use crate::config::{CocycleKind, RunConfig};
use crate::output::{num, profile_svg, Csv};
use crate::CliError;

fn energy(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.energy.ok_or_else(|| CliError::Config("`energy` is required for Schrödinger cocycles".into()))
}

pub fn build_cocycle(cfg: &RunConfig) -> Result<Cocycle, CliError> {
    let map = match cfg.kind {
        CocycleKind::Schrodinger => schrodinger(&cfg.potential, energy(cfg)?),
        CocycleKind::Rotation => oracles::rotation_map(cfg.degree),
        CocycleKind::Identity => CocycleMap::identity(),
        CocycleKind::DiagonalExponential => oracles::diagonal_exponential(cfg.q0),
    };
    Ok(Cocycle::new(cfg.alpha.clone(), map))
}

/// Rows `(eps, L, slope)` with `slope` the centered slope over `2π`, plus the
/// SVG when requested.
pub fn cmd_profile(cfg: &RunConfig) -> Result<(String, Option<String>), CliError> {
    let c = build_cocycle(cfg)?;
    let r = cfg.eps_range;
    let p = epsilon_profile(&c, r.min, r.max, r.points, &cfg.settings.acceleration)?;
    let mut csv = Csv::new(&["eps", "L", "slope"]);
    for i in 0..p.eps.len() {
        csv.row(&[num(p.eps[i]), num(p.values[i]), num(p.slopes[i])]);
    }
    let svg = cfg.svg.as_ref().map(|_| profile_svg(&p.eps, &p.values, &p.slopes));
    Ok((csv.finish(), svg))
}

/// Energy classification table.
pub fn cmd_classify(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.kind != CocycleKind::Schrodinger {
        return Err(CliError::Config("classify needs a Schrödinger cocycle".into()));
    }
    let alpha = match &cfg.alpha {
        Frequency::Irrational { value, .. } => *value,
        Frequency::Rational { .. } => return Err(CliError::Config("classify needs an irrational `alpha`".into())),
    };
    let energies = match cfg.energy {
        Some(e) => vec![e],
        None => cfg.energies.values(),
    };
    let rows = scan(&cfg.potential, alpha, &energies, &cfg.settings)?;
    let mut csv = Csv::new(&[
        "E",
        "L",
        "omega",
        "defect",
        "class",
        "stratumL_fit_residual",
        "boundary",
        "borderline",
    ]);
    for r in rows {
        csv.row(&[
            num(r.energy),
            num(r.l),
            r.omega.to_string(),
            num(r.defect),
            r.tag.name().to_string(),
            num(r.stratum_residual),
            u8::from(r.boundary).to_string(),
            u8::from(r.borderline).to_string(),
        ]);
    }
    Ok(csv.finish())
}

/// Derivatives of `L_{δ,j}` along `cos 2πkx` and `sin 2πkx`, `k = 0..=K`.
pub fn cmd_gradient(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.kind != CocycleKind::Schrodinger {
        return Err(CliError::Config("gradient needs a Schrödinger cocycle".into()));
    }
    let c = build_cocycle(cfg)?;
    let g = potential_gradient(
        &c,
        cfg.j,
        cfg.eps,
        cfg.modes,
        &cfg.settings.splitting,
        &cfg.settings.acceleration,
    )?;
    let mut csv = Csv::new(&["k", "d_cos", "d_sin", "pairing_defect", "witness"]);
    for r in &g.rows {
        csv.row(&[r.k.to_string(), num(r.d_cos), num(r.d_sin), num(r.pairing_defect), num(g.witness)]);
    }
    Ok(csv.finish())
}
