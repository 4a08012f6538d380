//! One function per subcommand, each producing JSON records.

use anyhow::Result;
use rayon::prelude::*;
use serde_json::{json, Value};

use fkt_core::complex::{betti, validate_complex, FiniteComplex, MetricFamily};
use fkt_core::det_line::{bundle_iso_exists, induced_map, metric_element, rep_holonomy};
use fkt_core::forms::{adiabatic_density, mehler_kernel};
use fkt_core::hyperbolic::{randol_zeta, randol_zeta_prime0, surface_torsion_scalar, torsion_constant_c, QuadratureSpec};
use fkt_core::io::{self, ComplexDto, DensityInstance, DetLineInstance, FormMatrixDto, HolonomyInstance, OpInstance, RelativeInstance};
use fkt_core::vn::{fk_determinant_abs_with, fk_determinant_with, SpectralTolerances};
use fkt_core::zeta::{anomaly_c, relative_torsion, variation_check, TorsionEvaluator};

use crate::{sweep_points, Cli, Command, GlobalArgs, RandolQuantity};

/// Input rejected before any computation.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Invalid(pub String);

fn tolerances(g: &GlobalArgs) -> SpectralTolerances<f64> {
    SpectralTolerances::default().with_kernel(g.tol_kernel)
}

fn load_complex(dto: &ComplexDto, g: &GlobalArgs) -> Result<(FiniteComplex<f64>, MetricFamily<f64>)> {
    let c = dto.to_complex()?.with_tolerances(tolerances(g));
    let mf = dto.to_family(&c)?;
    Ok((c, mf))
}

/// Evaluates `f` at every point in parallel; the records keep the order of
/// the points.
fn sweep(points: &[f64], f: impl Fn(f64) -> Result<Value> + Sync) -> Result<Vec<Value>> {
    points.par_iter().map(|&u| f(u)).collect()
}

/// Records of the command, and whether the input passed validation.
pub fn dispatch(cli: &Cli, input: &str) -> Result<(Vec<Value>, bool)> {
    let g = &cli.global;
    let one = |v: Value| Ok((vec![v], true));
    match &cli.command {
        Command::Fkdet => one(fkdet(io::from_json(input)?, g)?),
        Command::Detline => one(detline(io::from_json(input)?)?),
        Command::ComplexValidate => {
            let (v, ok) = complex_validate(&io::from_json(input)?, g)?;
            Ok((vec![v], ok))
        }
        Command::Torsion => Ok((torsion(&io::from_json(input)?, g)?, true)),
        Command::Vary { h } => Ok((vary(&io::from_json(input)?, *h, g)?, true)),
        Command::Relative => Ok((relative(&io::from_json(input)?, g)?, true)),
        Command::Holonomy => one(holonomy(io::from_json(input)?)?),
        Command::Randol { genus, what, s, p } => one(randol(*genus, *what, *s, *p, g)?),
        Command::Density => one(density(io::from_json(input)?)?),
    }
}

fn fkdet(inst: OpInstance, g: &GlobalArgs) -> Result<Value> {
    let op = inst.op.to_op(&inst.algebra.to_algebra()?)?;
    let tol = tolerances(g);
    let positive = op.is_endomorphism() && op.is_self_adjoint(tol.self_adjoint);
    let d = if positive { fk_determinant_with(&op, &tol)? } else { fk_determinant_abs_with(&op, &tol)? };
    Ok(json!({
        "det": d.value,
        "log_det": d.log_value,
        "d_class": d.d_class,
        "mode": if positive { "positive" } else { "abs" },
    }))
}

fn detline(inst: DetLineInstance) -> Result<Value> {
    let alg = inst.algebra.to_algebra()?;
    let e = metric_element(&inst.metric.to_op(&alg)?)?;
    let mut rec = json!({ "coeff": e.coeff(), "orientation": e.orientation() });
    if let Some(map) = &inst.map {
        let image = induced_map(&map.to_op(&alg)?, &e)?;
        rec["mapped_coeff"] = json!(image.coeff());
        rec["mapped_orientation"] = json!(image.orientation());
    }
    Ok(rec)
}

fn complex_validate(dto: &ComplexDto, g: &GlobalArgs) -> Result<(Value, bool)> {
    let (c, mf) = load_complex(dto, g)?;
    let report = validate_complex(&c);
    let bettis = if report.valid {
        Some((0..c.num_degrees()).map(|q| betti(&c, &mf, q, g.u)).collect::<fkt_core::Result<Vec<f64>>>()?)
    } else {
        None
    };
    let rec = json!({
        "valid": report.valid,
        "max_violation": report.max_violation,
        "euler_characteristic": c.euler_characteristic(),
        "d_squared": report.d_squared,
        "betti": bettis,
        "failures": report.failures,
    });
    Ok((rec, report.valid))
}

fn torsion(dto: &ComplexDto, g: &GlobalArgs) -> Result<Vec<Value>> {
    let (c, mf) = load_complex(dto, g)?;
    let ev = TorsionEvaluator::new(&c, &mf)?;
    sweep(&sweep_points(g)?, |u| {
        let p = ev.point(u)?;
        let rho = ev.element(&p);
        Ok(json!({
            "u": u,
            "zeta_prime0": p.graded_zeta_prime,
            "torsion_coeff": rho.coefficient(),
            "log_torsion": rho.log_coefficient(),
            "anomaly": p.anomaly,
            "zeta_prime": p.zeta_prime,
            "rho_prime": p.rho_prime,
            "betti": ev.betti(),
        }))
    })
}

fn vary(dto: &ComplexDto, h: f64, g: &GlobalArgs) -> Result<Vec<Value>> {
    let (c, mf) = load_complex(dto, g)?;
    let ev = TorsionEvaluator::new(&c, &mf)?;
    sweep(&sweep_points(g)?, |u| {
        let p = ev.point(u)?;
        let r = variation_check(&c, &mf, u, h)?;
        Ok(json!({
            "u": u,
            "zeta_prime0": p.graded_zeta_prime,
            "torsion_coeff": p.log_torsion().exp(),
            "anomaly": r.rhs,
            "gap": r.gap,
            "h": r.h,
            "lhs": r.lhs,
            "gap_opposite_sign": r.gap_opposite_sign,
            "truncation_estimate": r.truncation_estimate,
            "zeta_gap": r.zeta_gap,
            "rho_prime_gap": r.rho_prime_gap,
        }))
    })
}

fn relative(inst: &RelativeInstance, g: &GlobalArgs) -> Result<Vec<Value>> {
    let (ce, mfe) = load_complex(&inst.e, g)?;
    let (cf, mff) = load_complex(&inst.f, g)?;
    sweep(&sweep_points(g)?, |u| {
        let r = relative_torsion(&ce, &cf, &mfe, &mff, u)?;
        Ok(json!({
            "u": u,
            "ratio": r.ratio,
            "torsion_e": r.rho_e.coefficient(),
            "torsion_f": r.rho_f.coefficient(),
            "anomaly_e": anomaly_c(&ce, &mfe, u).ok(),
            "anomaly_f": anomaly_c(&cf, &mff, u).ok(),
        }))
    })
}

fn holonomy(inst: HolonomyInstance) -> Result<Value> {
    let alg = inst.algebra.to_algebra()?;
    let ops = |list: &[io::OpDto]| list.iter().map(|o| o.to_op(&alg)).collect::<fkt_core::Result<Vec<_>>>();
    let h = rep_holonomy(&ops(&inst.generators)?, &inst.relators)?;
    let mut rec = json!({ "generator_values": h.generator_values, "consistent": h.consistent });
    if let Some(other) = &inst.compare {
        let h2 = rep_holonomy(&ops(other)?, &inst.relators)?;
        rec["iso_exists"] = json!(bundle_iso_exists(&h, &h2)?);
    }
    Ok(rec)
}

fn randol(genus: u32, what: RandolQuantity, s: f64, p: u32, g: &GlobalArgs) -> Result<Value> {
    let spec = QuadratureSpec { r_max: g.rmax, abs_tol: g.tol_quad, ..Default::default() };
    let r = match what {
        RandolQuantity::Zeta => randol_zeta(s, genus, &spec)?,
        RandolQuantity::ZetaPrime => randol_zeta_prime0(genus, &spec)?,
        RandolQuantity::C => torsion_constant_c(&spec)?,
        RandolQuantity::Torsion => {
            let c = torsion_constant_c(&spec)?;
            let value = surface_torsion_scalar(genus, p, &spec)?;
            let est_error = value * f64::from(genus.saturating_sub(1)) * c.est_error;
            fkt_core::hyperbolic::QuadratureResult { value, est_error, panels: c.panels }
        }
    };
    Ok(json!({ "value": r.value, "est_error": r.est_error, "panels": r.panels }))
}

fn density(inst: DensityInstance) -> Result<Value> {
    let d = inst.d.to_matrix()?;
    let l = inst.l.to_matrix()?;
    let a = adiabatic_density(&d, &l, inst.z_trace, inst.r)?;
    let mut rec = json!({
        "raw_re": a.raw.re,
        "raw_im": a.raw.im,
        "unnormalized_re": a.unnormalized.re,
        "unnormalized_im": a.unnormalized.im,
        "prefactor_re": a.prefactor.re,
        "prefactor_im": a.prefactor.im,
    });
    match (&inst.c, &inst.x) {
        (Some(c), Some(x)) => {
            let k = mehler_kernel(&d, &c.to_matrix()?, &l, x, inst.r)?;
            rec["kernel"] = serde_json::to_value(FormMatrixDto::from_matrix(&k))?;
        }
        (None, None) => {}
        _ => return Err(Invalid("the heat kernel needs both C and x".into()).into()),
    }
    Ok(rec)
}
