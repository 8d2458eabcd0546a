//! One function per subcommand. Each returns the files it wrote.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use invis_core::born::{
    amplitude_from_transfer, amplitude_table, born_f_3d, AmplitudeTable, Method, Side,
};
use invis_core::empower::{
    fig2_curves, power_angles, screen_power, total_power_changes, Fig2Config, PowerSummary, ScreenSpec,
};
use invis_core::invispot::{ConstructionParams, ConstructionParams3d};
use invis_core::io::{parse_envelope_table, parse_sampled_field, CsvTable};
use invis_core::numcore::{gauss_grid, Custom2d, Envelope, MomentumGrid, PotentialSpec, Rect, WaveContext};
use invis_core::xfermat::{
    check_symplectic, conserved_current, default_slices, evolve_transfer, predicates_from_tables, Extraction,
    Solution, TransferOperator,
};
use invis_core::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::{io_err, CliError, Command};

type Files = Vec<PathBuf>;

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Files, CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    match cmd {
        Command::Construct => construct(cfg),
        Command::Amplitude => amplitude(cfg),
        Command::Verify => verify(cfg),
        Command::Xfer => xfer(cfg),
        Command::Power => power(cfg),
        Command::Fig2 => fig2(cfg),
    }
}

fn ctx(cfg: &RunConfig) -> Result<WaveContext, CliError> {
    Ok(WaveContext::from_pi_multiple(cfg.k)?)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

pub fn envelope(cfg: &RunConfig, g0: Complex64) -> Result<Envelope, CliError> {
    Ok(match cfg.envelope.as_str() {
        "gaussian" => Envelope::gaussian(g0, cfg.b)?,
        "quartic" => Envelope::quartic(g0, cfg.b)?,
        path => Envelope::tabulated(g0, &parse_envelope_table(&read(Path::new(path))?)?)?,
    })
}

pub fn construction(cfg: &RunConfig) -> Result<ConstructionParams, CliError> {
    Ok(ConstructionParams::new(cfg.ell, cfg.m, 1.0, envelope(cfg, cfg.g0_complex())?, ctx(cfg)?)?)
}

fn construction_3d(cfg: &RunConfig) -> Result<ConstructionParams3d, CliError> {
    let gx = envelope(cfg, cfg.g0_complex())?;
    let gy = envelope(cfg, Complex64::new(1.0, 0.0))?;
    Ok(ConstructionParams3d::new(cfg.ell, cfg.m, 1.0, gx, gy, ctx(cfg)?)?)
}

/// `constructed` and `random:<seed>` are scaled by `g0`; files are used as is.
pub fn potential(cfg: &RunConfig) -> Result<PotentialSpec, CliError> {
    if cfg.dimension == 3 {
        return match cfg.potential.as_str() {
            "constructed" => Ok(PotentialSpec::Constructed3d(construction_3d(cfg)?)),
            other => Err(CliError::Config(format!("potential {other:?} is not available in 3D"))),
        };
    }
    Ok(match cfg.potential.as_str() {
        "constructed" => PotentialSpec::Constructed2d(construction(cfg)?),
        "zero" => PotentialSpec::zero(),
        s if s.starts_with("random:") => {
            let seed: u64 = s["random:".len()..]
                .parse()
                .map_err(|_| CliError::Config(format!("bad random seed in {s:?}")))?;
            PotentialSpec::Custom2d(Custom2d::random_smooth(seed, 1.0).scaled(cfg.g0_complex()))
        }
        path => {
            let field = parse_sampled_field(&read(Path::new(path))?)?;
            PotentialSpec::Custom2d(Custom2d::from_samples(field, path))
        }
    })
}

fn grid(cfg: &RunConfig) -> Result<MomentumGrid, CliError> {
    Ok(gauss_grid(cfg.grid_n, &ctx(cfg)?)?)
}

fn slices(cfg: &RunConfig, v: &PotentialSpec, g: &MomentumGrid) -> Result<usize, CliError> {
    Ok(match cfg.slices {
        Some(s) => s,
        None => default_slices(v, g)?,
    })
}

fn header(cmd: &str, cfg: &RunConfig) -> Vec<String> {
    vec![format!("command: {cmd}"), format!("config: {}", cfg.to_json())]
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, CliError> {
    std::fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

fn write_csv(cfg: &RunConfig, cmd: &str, name: &str, mut table: CsvTable) -> Result<PathBuf, CliError> {
    let mut comments = header(cmd, cfg);
    comments.append(&mut table.comments);
    table.comments = comments;
    write(cfg.out.join(format!("{name}.csv")), &table.to_csv())
}

fn write_json<T: Serialize>(cfg: &RunConfig, cmd: &str, name: &str, body: &T) -> Result<PathBuf, CliError> {
    let mut obj = serde_json::Map::new();
    obj.insert("command".into(), json!(cmd));
    obj.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    match serde_json::to_value(body).expect("output serializes") {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("data".into(), other);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(obj)).expect("json");
    write(cfg.out.join(format!("{name}.json")), &text)
}

fn write_table(cfg: &RunConfig, cmd: &str, name: &str, table: CsvTable) -> Result<PathBuf, CliError> {
    match cfg.format {
        Format::Csv => write_csv(cfg, cmd, name, table),
        Format::Json => write_json(cfg, cmd, name, &json!({ "columns": table.header, "rows": table.rows })),
    }
}

fn construct(cfg: &RunConfig) -> Result<Files, CliError> {
    if cfg.dimension != 2 {
        return Err(CliError::Config("construct samples 2D potentials only".into()));
    }
    let v = potential(cfg)?;
    let (x0, x1, y0, y1) = match &v {
        PotentialSpec::Custom2d(c) if !c.is_zero() => {
            let r = c.rect();
            (r.x0, r.x1, r.y0, r.y1)
        }
        PotentialSpec::Constructed2d(p) => {
            let (lo, hi) = p.envelope().support();
            (0.0, 1.0, lo, hi)
        }
        _ => (0.0, 1.0, 0.0, 1.0),
    };
    // Pad by a quarter of the extent so the vanishing exterior is visible.
    let (px, py) = (0.25 * (x1 - x0), 0.25 * (y1 - y0));
    let rect = Rect::new(x0 - px, x1 + px, y0 - py, y1 + py)?;
    let mut table = CsvTable::new(&["x", "y", "re_v", "im_v"]);
    for ix in 0..cfg.nx {
        let x = rect.x0 + (rect.x1 - rect.x0) * ix as f64 / (cfg.nx - 1) as f64;
        for iy in 0..cfg.ny {
            let y = rect.y0 + (rect.y1 - rect.y0) * iy as f64 / (cfg.ny - 1) as f64;
            let val = v.value_2d(x, y)?;
            table.push(vec![x, y, val.re, val.im]);
        }
    }
    table.comments.push(format!("potential: {}", v.label()));
    Ok(vec![write_table(cfg, "construct", "potential", table)?])
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Born => "born",
        Method::ClosedForm => "closed_form",
        Method::Xfermat => "xfermat",
    }
}

fn amplitude_3d(cfg: &RunConfig) -> Result<AmplitudeTable, CliError> {
    if cfg.method == Method::Xfermat {
        return Err(CliError::Config("the transfer operator is available in 2D only".into()));
    }
    let p = construction_3d(cfg)?;
    let n = cfg.theta_samples;
    let mut thetas = Vec::new();
    let mut values = Vec::new();
    for i in 0..n {
        let th = PI * (i as f64 + 0.5) / n as f64;
        if th.cos().abs() < cfg.grazing_margin.max(invis_core::born::GRAZING_MARGIN) {
            continue;
        }
        thetas.push(th);
        values.push(born_f_3d(&p, cfg.side, th, cfg.phi)?);
    }
    Ok(AmplitudeTable {
        side: cfg.side,
        method: cfg.method,
        k: p.ctx().k(),
        grazing_margin: cfg.grazing_margin,
        thetas,
        values,
    })
}

pub fn amplitude_for(cfg: &RunConfig) -> Result<AmplitudeTable, CliError> {
    if cfg.dimension == 3 {
        return amplitude_3d(cfg);
    }
    let v = potential(cfg)?;
    let c = ctx(cfg)?;
    if cfg.method == Method::Xfermat {
        let g = grid(cfg)?;
        let ex = evolve_transfer(&v, &g, slices(cfg, &v, &g)?)?.extract_all()?;
        let (plus, minus) = match cfg.side {
            Side::Left => (&ex.left_plus, &ex.left_minus),
            Side::Right => (&ex.right_plus, &ex.right_minus),
        };
        return Ok(amplitude_from_transfer(plus, minus)?);
    }
    let thetas = invis_core::born::theta_samples(cfg.theta_samples, cfg.grazing_margin);
    Ok(amplitude_table(&v, cfg.side, cfg.method, &thetas, &c, cfg.grazing_margin)?)
}

fn amplitude(cfg: &RunConfig) -> Result<Files, CliError> {
    let t = amplitude_for(cfg)?;
    let name = format!("amplitude_{}_{}", side_name(t.side), method_name(t.method));
    let path = match cfg.format {
        Format::Csv => {
            let mut table = t.to_table();
            table.comments.push(format!("k: {}", t.k));
            write_csv(cfg, "amplitude", &name, table)?
        }
        Format::Json => write_json(cfg, "amplitude", &name, &t)?,
    };
    Ok(vec![path])
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    residual: f64,
    tolerance: f64,
}

fn relative(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

/// Residuals of the conservation, reciprocity and invisibility checks.
pub fn verify_report(cfg: &RunConfig) -> Result<Value, CliError> {
    let v = potential(cfg)?;
    let g = grid(cfg)?;
    let n_slices = slices(cfg, &v, &g)?;
    let m = evolve_transfer(&v, &g, n_slices)?;
    let ex: Extraction = m.extract_all()?;
    let pred = predicates_from_tables(&ex, cfg.tol);

    let symplectic = check_symplectic(&m)?;
    let j0 = g.center_index();
    let recip = relative(ex.reciprocity_vector()[j0].norm(), pred.scale);
    let (jm, jp) = conserved_current(&Solution::left_incident(&m, &ex)?, &Solution::right_incident(&m, &ex)?, &g)?;
    let current = relative((jm.value - jp.value).norm(), jm.value.norm().max(jp.value.norm()));
    let check_tol = 1e-6;
    let checks = vec![
        Check {
            name: "symplectic",
            pass: symplectic <= check_tol,
            residual: symplectic,
            tolerance: check_tol,
        },
        Check {
            name: "forward_amplitudes",
            pass: recip <= check_tol,
            residual: recip,
            tolerance: check_tol,
        },
        Check {
            name: "current_conservation",
            pass: current <= check_tol,
            residual: current,
            tolerance: check_tol,
        },
        Check {
            name: "regular_m22",
            pass: !ex.spectral_singularity,
            residual: ex.m22_condition,
            tolerance: invis_core::xfermat::SINGULARITY_THRESHOLD,
        },
    ];
    Ok(json!({
        "potential": v.label(),
        "slices": n_slices,
        "checks": checks,
        "predicates": pred,
        "all_pass": checks.iter().all(|c| c.pass),
    }))
}

fn verify(cfg: &RunConfig) -> Result<Files, CliError> {
    let report = verify_report(cfg)?;
    Ok(vec![write_json(cfg, "verify", "verify", &report)?])
}

fn transfer_tables(ex: &Extraction) -> CsvTable {
    let mut t = CsvTable::new(&[
        "p",
        "re_tl_minus",
        "im_tl_minus",
        "re_tl_plus",
        "im_tl_plus",
        "re_tr_minus",
        "im_tr_minus",
        "re_tr_plus",
        "im_tr_plus",
    ]);
    for (j, p) in ex.left_minus.grid.nodes().iter().enumerate() {
        let mut row = vec![*p];
        for tab in [&ex.left_minus, &ex.left_plus, &ex.right_minus, &ex.right_plus] {
            row.push(tab.values[j].re);
            row.push(tab.values[j].im);
        }
        t.push(row);
    }
    t
}

fn xfer(cfg: &RunConfig) -> Result<Files, CliError> {
    let v = potential(cfg)?;
    let g = grid(cfg)?;
    let m: TransferOperator = evolve_transfer(&v, &g, slices(cfg, &v, &g)?)?;
    let ex = m.extract_all()?;
    let op: Value = serde_json::from_str(&m.to_json()).expect("operator json");
    let a = write_json(cfg, "xfer", "transfer_operator", &json!({ "operator": op }))?;
    let mut table = transfer_tables(&ex);
    table.comments.push(format!("m22_condition: {:e}", ex.m22_condition));
    let b = write_table(cfg, "xfer", "transfer_tables", table)?;
    Ok(vec![a, b])
}

#[derive(Debug, Serialize)]
pub struct PowerReport {
    pub summary: PowerSummary,
    pub screen: Option<ScreenReport>,
}

#[derive(Debug, Serialize)]
pub struct ScreenReport {
    pub d: f64,
    pub s: f64,
    pub dp_hat: f64,
    pub far_field: bool,
}

pub fn power_report(cfg: &RunConfig) -> Result<PowerReport, CliError> {
    if cfg.dimension != 2 {
        return Err(CliError::Config("power is computed for 2D potentials".into()));
    }
    let v = potential(cfg)?;
    let c = ctx(cfg)?;
    let thetas = power_angles(cfg.power_angles);
    let method = if cfg.method == Method::Xfermat { Method::Born } else { cfg.method };
    let method_for = |side| if side == Side::Right && method == Method::ClosedForm { Method::Born } else { method };
    let l = amplitude_table(&v, Side::Left, method_for(Side::Left), &thetas, &c, 0.0)?;
    let r = amplitude_table(&v, Side::Right, method_for(Side::Right), &thetas, &c, 0.0)?;
    let summary = total_power_changes(&l, &r)?;
    let screen = match &v {
        PotentialSpec::Constructed2d(p) => {
            let spec = ScreenSpec::new(cfg.d, cfg.s_max)?;
            let (lo, hi) = p.envelope().support();
            Some(ScreenReport {
                d: cfg.d,
                s: cfg.s_max,
                dp_hat: screen_power(p, &spec)?,
                far_field: spec.is_far(1f64.max(hi - lo)),
            })
        }
        _ => None,
    };
    Ok(PowerReport { summary, screen })
}

fn power(cfg: &RunConfig) -> Result<Files, CliError> {
    let rep = power_report(cfg)?;
    if let Some(s) = &rep.screen {
        if !s.far_field {
            eprintln!("warning: screen distance {} is not large compared to the wire", s.d);
        }
    }
    let path = match cfg.format {
        Format::Json => write_json(cfg, "power", "power", &rep)?,
        Format::Csv => {
            let s = &rep.summary;
            let mut cols = vec!["dp_minus_left", "dp_plus_left", "dp_minus_right", "dp_plus_right", "quadrature_error"];
            let mut row = vec![s.dp_minus_left, s.dp_plus_left, s.dp_minus_right, s.dp_plus_right, s.quadrature_error];
            if let Some(sc) = &rep.screen {
                cols.extend(["d", "s", "dP_hat"]);
                row.extend([sc.d, sc.s, sc.dp_hat]);
            }
            let mut t = CsvTable::new(&cols);
            t.push(row);
            write_csv(cfg, "power", "power", t)?
        }
    };
    Ok(vec![path])
}

pub fn fig2_config(cfg: &RunConfig) -> Fig2Config {
    Fig2Config {
        k_over_pi: cfg.k_list.clone(),
        ell: cfg.ell,
        m: cfg.m,
        g0: cfg.g0_complex(),
        b: cfg.b,
        d: cfg.d,
        s_max: cfg.s_max,
        samples: cfg.samples,
    }
}

fn fig2(cfg: &RunConfig) -> Result<Files, CliError> {
    let curves = fig2_curves(&fig2_config(cfg))?;
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for c in &curves {
        let name = format!("fig2_k{}pi", c.k_over_pi);
        let path = match cfg.format {
            Format::Csv => {
                let mut t = c.to_table();
                t.comments.push(format!("k_over_pi: {}", c.k_over_pi));
                write_csv(cfg, "fig2", &name, t)?
            }
            Format::Json => write_json(cfg, "fig2", &name, c)?,
        };
        entries.push(json!({
            "k_over_pi": c.k_over_pi,
            "file": path.file_name().map(|f| f.to_string_lossy().into_owned()),
            "rows": c.s_values.len(),
        }));
        files.push(path);
    }
    files.push(write_json(cfg, "fig2", "manifest", &json!({ "curves": entries }))?);
    Ok(files)
}
