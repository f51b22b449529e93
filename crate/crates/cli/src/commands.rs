use std::fs;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use xychain::analysis::{
    boundary_curve, boundary_point_evolution, determinant_deviation_fields, mean_determinant_fields,
    optimize_registration_time, preimage_contours, shifted_boundary_scan, time_curves as curves, write_contours_csv,
    AlphaAverage, BoundarySearch,
};
use xychain::statistics::{concurrence_moments, normalized_curves, witness, Axis, Grid1D, ScalarField, SweepGrid};
use xychain::transfer_tensor::classify_families;
use xychain::{Angle, ChainSpec, TIndex, TransferTensor};

use crate::cache;
use crate::config::{Format, RunConfig, TimeChoice, TimeKeyword};
use crate::CliError;

type CmdResult = Result<(), CliError>;

/// Buffered writer on the configured output file or standard output.
fn output(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.output.path {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(cfg: &RunConfig, value: &T) -> CmdResult {
    let mut w = output(cfg)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn chain(cfg: &RunConfig) -> Result<ChainSpec, CliError> {
    Ok(ChainSpec::new(cfg.chain.n, cfg.chain.coupling)?)
}

fn registration_time(cfg: &RunConfig, spec: &ChainSpec) -> Result<f64, CliError> {
    match cfg.time.value {
        TimeChoice::Fixed(t) => Ok(t),
        TimeChoice::Named(TimeKeyword::Optimize) => {
            let s = &cfg.time;
            let r = optimize_registration_time(spec, (s.search_start, s.search_stop), s.search_step)?;
            eprintln!("registration time t* = {} (mean probability {})", r.t_star, r.mean_probability);
            Ok(r.t_star)
        }
    }
}

fn tensor(cfg: &RunConfig) -> Result<TransferTensor, CliError> {
    let spec = chain(cfg)?;
    let time = registration_time(cfg, &spec)?;
    Ok(cache::tensor(&spec, time, cfg.run.cache_dir.as_deref())?)
}

fn angle_grid(cfg: &RunConfig) -> Result<SweepGrid, CliError> {
    Ok(SweepGrid::angles(cfg.grids.angle_step)?)
}

fn lambda_grid(cfg: &RunConfig) -> Result<SweepGrid, CliError> {
    let g = &cfg.grids;
    Ok(SweepGrid::lambdas(g.lambda_start, g.lambda_stop, g.lambda_step)?)
}

fn family_report(t: &TransferTensor) -> String {
    let fam = classify_families(t);
    let mut out = format!("# magnitude families of T, N = {}, D = {}, t = {}\n", t.n_nodes, t.coupling, t.time);
    for (k, band) in fam.bands.iter().enumerate() {
        out.push_str(&format!("family {}: {} values\n", k + 1, band.len()));
        for (idx, v) in band {
            out.push_str(&format!("  {idx}  {} {:+}i  |T| = {}\n", v.re, v.im, v.norm()));
        }
    }
    out.push_str(&format!("gap between families 2 and 3: {}\n", fam.gap_2_3));
    out
}

#[derive(Serialize)]
struct TensorJson {
    n_nodes: usize,
    coupling: f64,
    time: f64,
    entries: Vec<(String, f64, f64)>,
    families: Vec<Vec<(String, f64, f64)>>,
    gap_2_3: f64,
}

pub fn tparams(cfg: &RunConfig) -> CmdResult {
    let t = tensor(cfg)?;
    match cfg.output.format {
        Format::Csv => {
            let mut w = output(cfg)?;
            t.write_archive(&mut w)?;
            w.flush()?;
            let report = family_report(&t);
            match &cfg.output.path {
                Some(path) => {
                    let mut name = path.as_os_str().to_owned();
                    name.push(".families.txt");
                    fs::write(&name, report).map_err(|e| CliError::Runtime(e.to_string()))?;
                }
                None => eprint!("{report}"),
            }
            Ok(())
        }
        Format::Json => {
            let fam = classify_families(&t);
            let json = TensorJson {
                n_nodes: t.n_nodes,
                coupling: t.coupling,
                time: t.time,
                entries: TIndex::all()
                    .filter(|&i| t.at(i).norm() != 0.0)
                    .map(|i| (i.to_string(), t.at(i).re, t.at(i).im))
                    .collect(),
                families: fam
                    .bands
                    .iter()
                    .map(|b| b.iter().map(|(i, c)| (i.to_string(), c.re, c.im)).collect())
                    .collect(),
                gap_2_3: fam.gap_2_3,
            };
            write_json(cfg, &json)
        }
    }
}

/// Sweep quantities accepted by `--quantity`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    ConcurrenceMean,
    ConcurrenceDev(Angle),
    Delta2Mean,
    Delta1Mean,
    /// Deviation of the two- (`2`) or one-parameter (`1`) condition.
    DeltaDev(u8, Angle),
    Witness,
}

fn parse_angle(s: &str) -> Option<Angle> {
    Angle::ALL.into_iter().find(|a| a.name() == s)
}

impl std::str::FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Usage(format!(
                "unknown quantity `{s}` (expected concurrence_mean, concurrence_dev:ANGLE, delta2_mean, \
                 delta1_mean, delta_dev:1|2:ANGLE or witness)"
            ))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["concurrence_mean"] => Ok(Quantity::ConcurrenceMean),
            ["delta2_mean"] => Ok(Quantity::Delta2Mean),
            ["delta1_mean"] => Ok(Quantity::Delta1Mean),
            ["witness"] => Ok(Quantity::Witness),
            ["concurrence_dev", a] => parse_angle(a).map(Quantity::ConcurrenceDev).ok_or_else(bad),
            ["delta_dev", k @ ("1" | "2"), a] => {
                parse_angle(a).map(|a| Quantity::DeltaDev(k.parse().unwrap(), a)).ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }
}

fn lambda_field(
    name: &str,
    lambdas: &SweepGrid,
    mut f: impl FnMut(f64, f64) -> Result<f64, CliError>,
) -> Result<ScalarField, CliError> {
    let gr = lambdas.get(Axis::LambdaR).expect("lambda grid");
    let gs = lambdas.get(Axis::LambdaS).expect("lambda grid");
    let mut values = Vec::with_capacity(gr.len() * gs.len());
    for lr in gr.nodes() {
        for ls in gs.nodes() {
            values.push(f(lr, ls)?);
        }
    }
    Ok(ScalarField {
        quantity: name.to_owned(),
        axis1: (Axis::LambdaR, gr),
        axis2: (Axis::LambdaS, gs),
        values,
        metadata: Vec::new(),
    })
}

pub fn sweep(cfg: &RunConfig) -> CmdResult {
    let quantity: Quantity = cfg.sweep.quantity.parse()?;
    let lambdas = lambda_grid(cfg)?;
    let angles = angle_grid(cfg)?;
    let t = tensor(cfg)?;
    let name = cfg.sweep.quantity.as_str();
    let field = match quantity {
        Quantity::ConcurrenceMean => {
            lambda_field(name, &lambdas, |lr, ls| Ok(concurrence_moments(&t, ls, lr, &angles)?.mean))?
        }
        Quantity::ConcurrenceDev(a) => {
            lambda_field(name, &lambdas, |lr, ls| Ok(concurrence_moments(&t, ls, lr, &angles)?.deviation(a)))?
        }
        Quantity::Witness => lambda_field(name, &lambdas, |lr, ls| Ok(witness(&t, ls, lr, &angles)?))?,
        Quantity::Delta2Mean | Quantity::Delta1Mean => {
            let [d2, d1] = mean_determinant_fields(&t, &lambdas, &angles, AlphaAverage::Analytic)?;
            if quantity == Quantity::Delta2Mean {
                d2
            } else {
                d1
            }
        }
        Quantity::DeltaDev(k, a) => {
            let fields = determinant_deviation_fields(&t, &lambdas, &angles)?;
            fields[2 - k as usize][a.position()].clone()
        }
    };
    let mut field = ScalarField { metadata: Vec::new(), ..field }
        .with_meta("n_nodes", t.n_nodes)
        .with_meta("coupling", t.coupling)
        .with_meta("time", t.time)
        .with_meta("angle_step", cfg.grids.angle_step);
    field.quantity = name.to_owned();
    match cfg.output.format {
        Format::Csv => {
            let mut w = output(cfg)?;
            field.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => write_json(cfg, &field),
    }
}

fn search(cfg: &RunConfig) -> BoundarySearch {
    let b = &cfg.boundary;
    BoundarySearch { angle_step: b.angle_step, refine_step: b.refine_step, tol: b.tol, ray_step: b.ray_step }
}

fn time_nodes([start, stop, step]: [f64; 3]) -> Result<Vec<f64>, CliError> {
    Ok(Grid1D::new(start, stop, step)?.nodes())
}

pub fn boundary(cfg: &RunConfig) -> CmdResult {
    let spec = chain(cfg)?;
    if let Some(range) = cfg.boundary.evolution {
        let series = boundary_point_evolution(&spec, &time_nodes(range)?, &search(cfg))?;
        return match cfg.output.format {
            Format::Json => write_json(cfg, &series),
            Format::Csv => {
                let mut w = output(cfg)?;
                writeln!(w, "# quantity=bisectrix_crossing")?;
                writeln!(w, "# n_nodes={}", spec.n_nodes)?;
                writeln!(w, "# coupling={}", spec.coupling)?;
                writeln!(w, "t,bisectrix_crossing")?;
                for (t, x) in series {
                    match x {
                        Some(x) => writeln!(w, "{t},{x}")?,
                        None => writeln!(w, "{t},")?,
                    }
                }
                w.flush()?;
                Ok(())
            }
        };
    }
    let t = tensor(cfg)?;
    let curve = boundary_curve(&t, &search(cfg))?;
    match cfg.output.format {
        Format::Json => write_json(cfg, &curve),
        Format::Csv => {
            let mut w = output(cfg)?;
            writeln!(w, "# quantity=boundary")?;
            writeln!(w, "# n_nodes={}", t.n_nodes)?;
            writeln!(w, "# coupling={}", t.coupling)?;
            writeln!(w, "# time={}", curve.time)?;
            writeln!(w, "# bisectrix_crossing={}", curve.bisectrix_crossing)?;
            writeln!(w, "# lambda_s_min={}", curve.lambda_s_min)?;
            writeln!(w, "lambda_r,lambda_s")?;
            for (lr, ls) in &curve.points {
                writeln!(w, "{lr},{ls}")?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn contours(cfg: &RunConfig) -> CmdResult {
    let t = tensor(cfg)?;
    let grid = Grid1D::unit(cfg.contours.grid_step)?;
    let (list, skipped) = match cfg.contours.shift {
        Some(shift) => {
            let curve = boundary_curve(&t, &search(cfg))?;
            let scan = shifted_boundary_scan(&t, &curve, shift, grid)?;
            (scan.contours, scan.skipped)
        }
        None => {
            let pairs: Vec<(f64, f64)> = cfg.contours.pairs.iter().map(|p| (p[0], p[1])).collect();
            (preimage_contours(&t, &pairs, grid)?, Vec::new())
        }
    };
    for (lr, ls) in &skipped {
        eprintln!("notice: shifted point ({lr}, {ls}) leaves the unit square, skipped");
    }
    for c in list.iter().filter(|c| !c.simply_connected) {
        eprintln!(
            "notice: region at (lambda_r, lambda_s) = ({}, {}) is not simply connected ({} pieces)",
            c.lambda_r, c.lambda_s, c.components
        );
    }
    match cfg.output.format {
        Format::Json => write_json(cfg, &list),
        Format::Csv => {
            let mut w = output(cfg)?;
            writeln!(w, "# quantity=preimage_contours")?;
            writeln!(w, "# n_nodes={}", t.n_nodes)?;
            writeln!(w, "# time={}", t.time)?;
            writeln!(w, "# grid_step={}", cfg.contours.grid_step)?;
            write_contours_csv(&list, &mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

pub fn time_curves(cfg: &RunConfig) -> CmdResult {
    let spec = chain(cfg)?;
    let tc = &cfg.time_curves;
    let times = time_nodes([tc.start, tc.stop, tc.step])?;
    let series = curves(&spec, &times, &lambda_grid(cfg)?, &angle_grid(cfg)?)?;
    let norm = normalized_curves(&series)?;
    match cfg.output.format {
        Format::Json => write_json(cfg, &(series, norm)),
        Format::Csv => {
            let names = ["mean_probability", "concurrence", "delta2", "delta1"];
            let mut w = output(cfg)?;
            writeln!(w, "# quantity=time_curves")?;
            writeln!(w, "# n_nodes={}", spec.n_nodes)?;
            writeln!(w, "# coupling={}", spec.coupling)?;
            for (k, n) in names.iter().enumerate() {
                writeln!(w, "# max_{n}={} at t={}", norm.maxima[k], norm.argmax[k])?;
            }
            writeln!(w, "t,{},{}", names.join(","), names.map(|n| format!("norm_{n}")).join(","))?;
            for (raw, scaled) in series.iter().zip(&norm.points) {
                let q = raw.quantities();
                let s = scaled.quantities();
                writeln!(w, "{},{},{},{},{},{},{},{},{}", raw.t, q[0], q[1], q[2], q[3], s[0], s[1], s[2], s[3])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
