use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use finsler_core::convexbody::{blaschke_body_with_options, MinkowskiOptions};
use finsler_core::geodesic::{
    busemann_prime_length, crofton_area_check, geodesic_trace, reversal_trace, santalo_check, GeodesicOptions,
    REVERSIBILITY_TOL,
};
use finsler_core::metricfield::{FieldSpec, Region};
use finsler_core::numerics::vector::{normalize3, Vec3};
use finsler_core::numerics::DirectionGrid;
use finsler_core::report::CheckReport;
use finsler_core::rigidity::{
    chakerian_check, detect_reversible_plus_closed, ht_density_rigidity_check, zoll_volume_check, ZOLL_TOL,
};
use finsler_core::{ConvexBody, Curve, MetricField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::args::{BodyOp, CheckKind, Cli, Command, Format, Global};
use crate::emit::{diag, finish, render, retolerate, write_out};
use crate::{Failure, EXIT_PASS};

type Outcome = Result<i32, Failure>;

pub fn dispatch(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Build { config, out } => build(config, out.as_deref()),
        Command::Volume { field, region, out } => volume(g, field, region, out.as_deref()),
        Command::Geodesic { field, x0, v0, t, out } => geodesic(g, field, x0, v0, *t, out.as_deref()),
        Command::Check {
            kind,
            fields,
            body,
            gauge,
            curve,
            samples,
            t,
            out,
        } => {
            let report = match kind {
                CheckKind::Zoll => zoll_volume_check(&one_field(fields)?, level(g, 3))?,
                CheckKind::Santalo => santalo_check(&one_field(fields)?, level(g, 3))?,
                CheckKind::Crofton => {
                    let c = Curve::parse(curve)?;
                    crofton_area_check(&one_field(fields)?, &c, level(g, 4))?
                }
                CheckKind::Reversibility => reversibility(g, &one_field(fields)?, *samples, *t)?,
                CheckKind::RevPlusClosed => {
                    let f = one_field(fields)?;
                    detect_reversible_plus_closed(&f, &f.sample_points()?)?.report
                }
                CheckKind::Chakerian => {
                    let k = read_body(body.as_deref().ok_or_else(|| Failure::usage("chakerian needs --body"))?)?;
                    let b = read_body(gauge.as_deref().ok_or_else(|| Failure::usage("chakerian needs --gauge"))?)?;
                    chakerian_check(&k, &b, level(g, 2))?
                }
                CheckKind::DensityRigidity => {
                    if fields.len() != 2 {
                        return Err(Failure::usage(format!(
                            "density-rigidity needs two fields, got {}",
                            fields.len()
                        )));
                    }
                    ht_density_rigidity_check(&read_field(&fields[0])?, &read_field(&fields[1])?, level(g, 3))?
                }
            };
            emit_report(g, report, out.as_deref())
        }
        Command::Body { op, input, out } => body(g, *op, input, out.as_deref()),
    }
}

fn level(g: &Global, default: u32) -> u32 {
    g.grid_level.unwrap_or(default)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_field(path: &Path) -> Result<MetricField, Failure> {
    let spec = FieldSpec::from_json(&read_text(path)?)?;
    let f = spec.build()?;
    diag("info", "field", json!({"path": path.display().to_string(), "family": f.family_name()}));
    Ok(f)
}

fn one_field(fields: &[PathBuf]) -> Result<MetricField, Failure> {
    match fields {
        [f] => read_field(f),
        _ => Err(Failure::usage(format!("expected one --field, got {}", fields.len()))),
    }
}

fn read_body(path: &Path) -> Result<ConvexBody, Failure> {
    Ok(ConvexBody::from_json(&read_text(path)?)?)
}

fn emit_report(g: &Global, report: CheckReport, out: Option<&Path>) -> Outcome {
    let report = match g.tol {
        Some(t) if t > 0.0 => retolerate(report, t),
        Some(t) => return Err(Failure::usage(format!("--tol must be positive, got {t}"))),
        None => report,
    };
    let text = render(&report, g.format).map_err(Failure::usage)?;
    write_out(out, &text).map_err(Failure::usage)?;
    Ok(finish(&report))
}

fn build(config: &Path, out: Option<&Path>) -> Outcome {
    let spec = FieldSpec::from_json(&read_text(config)?)?;
    let f = spec.build()?;
    let (min, x, v) = f.min_fiber_value()?;
    if !(min > 0.0) {
        return Err(Failure::usage(format!("field is not positive: F({x:?}, {v:?}) = {min:.3e}")));
    }
    diag(
        "info",
        "built",
        json!({"family": f.family_name(), "smooth": f.is_smooth(), "min_fiber_value": min}),
    );
    write_out(out, &(spec.to_json()? + "\n")).map_err(Failure::usage)?;
    Ok(EXIT_PASS)
}

fn parse_list(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Failure::usage(format!("bad number '{p}' in region"))))
        .collect()
}

/// `whole`, `box:lo:hi` or `ball:center:radius`.
pub fn parse_region(s: &str) -> Result<Region, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["whole"] => Ok(Region::Whole),
        ["box", lo, hi] => Ok(Region::Box {
            lo: parse_list(lo)?,
            hi: parse_list(hi)?,
        }),
        ["ball", c, r] => Ok(Region::Ball {
            center: parse_list(c)?,
            radius: r.trim().parse().map_err(|_| Failure::usage(format!("bad radius '{r}'")))?,
        }),
        _ => Err(Failure::usage(format!("unknown region '{s}'"))),
    }
}

fn volume(g: &Global, path: &Path, region: &str, out: Option<&Path>) -> Outcome {
    let f = read_field(path)?;
    let region = parse_region(region)?;
    let lvl = level(g, 3);
    let v = f.ht_volume(&region, lvl)?;
    let mut report = CheckReport::new("volume", &format!("{}|{region:?}|{lvl}", f.describe())).value("volume", v);
    // Busemann fields on the whole sphere carry the prediction V = ℓ²/π
    if f.as_busemann().is_some() && region == Region::Whole {
        let ell = busemann_prime_length(&f, lvl + 2)?;
        let predicted = ell * ell / PI;
        report = report
            .value("prime_length", ell)
            .value("predicted_volume", predicted)
            .residual("relative_mismatch", (v - predicted).abs() / v, ZOLL_TOL);
    }
    emit_report(g, report.judge(), out)
}

fn geodesic(g: &Global, path: &Path, x0: &[f64], v0: &[f64], t: f64, out: Option<&Path>) -> Outcome {
    let f = read_field(path)?;
    if !(t > 0.0) {
        return Err(Failure::usage(format!("--T must be positive, got {t}")));
    }
    let tr = geodesic_trace(&f, x0, v0, t, &GeodesicOptions::default())?;
    let summary = json!({
        "samples": tr.samples.len(),
        "duration": tr.duration(),
        "energy_drift": tr.energy_drift(),
        "speed_defect": tr.speed_defect(&f),
    });
    diag("info", "geodesic", summary.clone());
    match g.format {
        Format::Csv => write_out(out, &tr.to_csv()).map_err(Failure::usage)?,
        Format::Json => {
            // the trajectory file is CSV; the summary goes to stdout
            if out.is_some() {
                write_out(out, &tr.to_csv()).map_err(Failure::usage)?;
                write_out(None, &format!("{summary}\n")).map_err(Failure::usage)?;
            } else {
                write_out(None, &tr.to_csv()).map_err(Failure::usage)?;
            }
        }
    }
    Ok(EXIT_PASS)
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec3 {
    loop {
        let mut p = [0.0; 3];
        for c in p.iter_mut().take(dim) {
            *c = rng.gen_range(-1.0..1.0);
        }
        let r2: f64 = p.iter().map(|c| c * c).sum();
        if r2 > 1e-4 && r2 <= 1.0 {
            return normalize3(&p);
        }
    }
}

/// Seeded initial conditions, traced in parallel and reduced in order.
fn reversibility(g: &Global, f: &MetricField, samples: usize, t: f64) -> Result<CheckReport, Failure> {
    if samples == 0 {
        return Err(Failure::usage("--samples must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let points = f.sample_points()?;
    let n = f.ambient_dim();
    let mut inits = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (x, v) = if f.is_sphere() {
            let x = random_unit(&mut rng, 3);
            let w = random_unit(&mut rng, 3);
            let d = x[0] * w[0] + x[1] * w[1] + x[2] * w[2];
            (x, normalize3(&[w[0] - d * x[0], w[1] - d * x[1], w[2] - d * x[2]]))
        } else {
            (points[rng.gen_range(0..points.len())], random_unit(&mut rng, n))
        };
        inits.push((x[..n].to_vec(), v[..n].to_vec()));
    }
    let distances: Vec<f64> = inits
        .par_iter()
        .map(|(x, v)| reversal_trace(f, x, v, t).map(|r| r.distance))
        .collect::<finsler_core::Result<Vec<_>>>()?;
    let worst = distances.iter().cloned().fold(0.0, f64::max);
    Ok(CheckReport::new("reversibility", &format!("{}|{:?}|{t}", f.describe(), inits))
        .value("samples", samples as f64)
        .value("arclength", t)
        .value("seed", g.seed as f64)
        .residual("hausdorff", worst, REVERSIBILITY_TOL)
        .judge())
}

fn body(g: &Global, op: BodyOp, input: &Path, out: Option<&Path>) -> Outcome {
    let k = read_body(input)?;
    let text = match op {
        BodyOp::Blaschke => {
            let (b, sol) = blaschke_body_with_options(&k, &MinkowskiOptions::default())?;
            if let Some(s) = sol {
                diag("info", "minkowski", json!({"iterations": s.iterations}));
            }
            b.to_json() + "\n"
        }
        BodyOp::Polar => k.polar()?.to_json() + "\n",
        BodyOp::Symmetral => k.central_symmetral()?.to_json() + "\n",
        BodyOp::Brightness => {
            let grid = DirectionGrid::cached(k.dim(), level(g, 2))?;
            let mut rows = Vec::with_capacity(grid.len());
            for i in 0..grid.len() {
                let u = grid.node3(i);
                rows.push((u, k.brightness(&u[..k.dim()])?));
            }
            match g.format {
                Format::Csv => {
                    let mut s = String::from("u1,u2,u3,brightness\n");
                    for (u, b) in &rows {
                        s.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", u[0], u[1], u[2], b));
                    }
                    s
                }
                Format::Json => {
                    let dirs: Vec<Vec<f64>> = rows.iter().map(|(u, _)| u[..k.dim()].to_vec()).collect();
                    let vals: Vec<f64> = rows.iter().map(|(_, b)| *b).collect();
                    serde_json::to_string_pretty(&json!({"directions": dirs, "brightness": vals}))
                        .map_err(|e| Failure::usage(e.to_string()))?
                        + "\n"
                }
            }
        }
    };
    write_out(out, &text).map_err(Failure::usage)?;
    Ok(EXIT_PASS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions_parse() {
        assert_eq!(parse_region("whole").unwrap(), Region::Whole);
        assert_eq!(
            parse_region("box:-1,-1:1,1").unwrap(),
            Region::Box {
                lo: vec![-1.0, -1.0],
                hi: vec![1.0, 1.0]
            }
        );
        assert!(matches!(parse_region("ball:0,0:0.5").unwrap(), Region::Ball { radius, .. } if radius == 0.5));
        assert!(parse_region("donut").is_err());
        assert!(parse_region("box:1,x:2,2").is_err());
    }

    #[test]
    fn random_units_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let u = random_unit(&mut rng, 2);
            assert!((u[0].hypot(u[1]) - 1.0).abs() < 1e-14 && u[2] == 0.0);
        }
    }
}
