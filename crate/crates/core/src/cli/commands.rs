use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::config::{Format, Method, RunConfig, StateSpec};
use super::CliError;
use crate::gkp::{
    approx_codeword, codeword, logical_from_overlap, stabilizer_residual, GKPCode, LogicalQubit, Mixture,
    PureState,
};
use crate::operators::{apply_X, apply_Z};
use crate::ssd::{ec_gauge_trace, gauge_trace, to_ssd_mixture};
use crate::zak_core::io::{grid_to_bytes, grid_to_csv, magnitude_phase_csv, points_to_csv, write_atomic};
use crate::zak_core::{zak_transform, ModularWavefunction, PositionStateDescriptor, TabulatedState, ZakGrid};

fn code(cfg: &RunConfig) -> Result<GKPCode, CliError> {
    Ok(GKPCode::qubit(cfg.alpha)?)
}

fn grid(cfg: &RunConfig) -> Result<ZakGrid, CliError> {
    Ok(code(cfg)?.grid(cfg.nu, cfg.nv)?)
}

/// Reads `x,re,im` rows on a uniform x grid; a non-numeric first line is a header.
fn read_tabulated(path: &Path) -> Result<TabulatedState, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 3 => {
                xs.push(v[0]);
                values.push(Complex64::new(v[1], v[2]));
            }
            None if n == 0 => continue,
            _ => {
                return Err(CliError::Config(format!(
                    "{}:{}: expected x,re,im",
                    path.display(),
                    n + 1
                )))
            }
        }
    }
    if xs.len() < 2 {
        return Err(CliError::Config(format!("{}: need at least two samples", path.display())));
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let uniform = xs
        .iter()
        .enumerate()
        .all(|(i, x)| (x - (xs[0] + dx * i as f64)).abs() <= 1e-9 * dx.abs().max(1.0));
    if !uniform {
        return Err(CliError::Config(format!("{}: x values are not uniformly spaced", path.display())));
    }
    Ok(TabulatedState::new(xs[0], dx, values)?)
}

fn build_state(cfg: &RunConfig) -> Result<PureState, CliError> {
    let code = code(cfg)?;
    let descriptor = match &cfg.state {
        StateSpec::Codeword(l) => return Ok(PureState::Ideal(codeword(&code, *l)?)),
        StateSpec::Vacuum => PositionStateDescriptor::vacuum(),
        StateSpec::Approx { delta, l } => approx_codeword(&code, *l, delta.unwrap_or(cfg.delta))?,
        StateSpec::Tabulated(path) => PositionStateDescriptor::Tabulated(read_tabulated(path)?),
    };
    let z = zak_transform(&descriptor, &grid(cfg)?, cfg.mmax)?;
    Ok(PureState::Grid(z.wavefunction))
}

fn encode(psi: &ModularWavefunction, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => grid_to_csv(psi).into_bytes(),
        Format::Bin => grid_to_bytes(psi),
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or("out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map_or("out".into(), |s| s.to_os_string());
    name.push(".manifest");
    path.with_file_name(name)
}

pub fn zakplot(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let state = build_state(cfg)?;
    let (out, files) = match &state {
        PureState::Grid(psi) => {
            let out = cfg
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("zakplot.{}", cfg.format.extension())));
            write_atomic(&out, &encode(psi, cfg.format))?;
            let mp = sibling(&out, "_magphase.csv");
            write_atomic(&mp, magnitude_phase_csv(psi).as_bytes())?;
            (out.clone(), vec![out, mp])
        }
        PureState::Ideal(s) => {
            let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("zakplot_points.csv"));
            write_atomic(&out, points_to_csv(s).as_bytes())?;
            (out.clone(), vec![out])
        }
    };
    let listed: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    write_atomic(
        &manifest_path(&out),
        cfg.manifest("zakplot", &[("outputs", listed.join(";"))]).as_bytes(),
    )?;
    for f in files {
        writeln!(stdout, "wrote {}", f.display())?;
    }
    Ok(())
}

pub fn shift_array(
    cfg: &RunConfig,
    jmax: usize,
    kmax: usize,
    dx: f64,
    dy: f64,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let g = grid(cfg)?;
    g.u_steps(dx)?;
    g.v_steps(dy)?;
    let state = build_state(cfg)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("shift_array"));
    std::fs::create_dir_all(&dir)?;
    let mut origin = String::from("j,k,re,im,abs,arg\n");
    for j in 0..=jmax {
        for k in 0..=kmax {
            let (x, y) = (j as f64 * dx, k as f64 * dy);
            match &state {
                PureState::Grid(psi) => {
                    let panel = apply_X(&apply_Z(psi, y)?, x)?;
                    let name = format!("panel_j{j}_k{k}.{}", cfg.format.extension());
                    write_atomic(&dir.join(name), &encode(&panel, cfg.format))?;
                    let z = panel.evaluate_on_grid(0.0, 0.0)?;
                    let _ = writeln!(origin, "{j},{k},{:?},{:?},{:?},{:?}", z.re, z.im, z.norm(), z.arg());
                }
                PureState::Ideal(s) => {
                    let panel = apply_X(&apply_Z(s, y)?, x)?;
                    write_atomic(&dir.join(format!("panel_j{j}_k{k}.csv")), points_to_csv(&panel).as_bytes())?;
                    let z = panel.weight_at(0.0, 0.0);
                    let _ = writeln!(origin, "{j},{k},{:?},{:?},{:?},{:?}", z.re, z.im, z.norm(), z.arg());
                }
            }
        }
    }
    write_atomic(&dir.join("origin.csv"), origin.as_bytes())?;
    let extra = [
        ("jmax", jmax.to_string()),
        ("kmax", kmax.to_string()),
        ("dx", format!("{dx:?}")),
        ("dy", format!("{dy:?}")),
    ];
    write_atomic(&dir.join("manifest.txt"), cfg.manifest("shift-array", &extra).as_bytes())?;
    writeln!(stdout, "wrote {} panels to {}", (jmax + 1) * (kmax + 1), dir.display())?;
    Ok(())
}

fn logical_qubit(cfg: &RunConfig, code: &GKPCode, state: PureState) -> Result<LogicalQubit, CliError> {
    let rho = Mixture::pure(state);
    Ok(match cfg.method {
        Method::Overlap => logical_from_overlap(code, &rho)?,
        Method::Trace => gauge_trace(&to_ssd_mixture(code, &rho)?)?,
        Method::EcTrace => ec_gauge_trace(&to_ssd_mixture(code, &rho)?)?,
    })
}

fn emit(cfg: &RunConfig, command: &str, table: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            write_atomic(path, table.as_bytes())?;
            write_atomic(&manifest_path(path), cfg.manifest(command, &[]).as_bytes())?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        None => stdout.write_all(table.as_bytes())?,
    }
    Ok(())
}

pub fn logical(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let code = code(cfg)?;
    let q = logical_qubit(cfg, &code, build_state(cfg)?)?;
    let table = format!("{}\n{}\n", LogicalQubit::CSV_HEADER, q.csv_row());
    emit(cfg, "logical", &table, stdout)
}

pub fn sweep(cfg: &RunConfig, deltas: &[f64], target: usize, stdout: &mut dyn Write) -> Result<(), CliError> {
    if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(CliError::Config("sweep needs a nonempty list of positive deltas".into()));
    }
    if target > 1 {
        return Err(CliError::Config(format!("target must be 0 or 1, got {target}")));
    }
    let code = code(cfg)?;
    let g = grid(cfg)?;
    let mut table = String::from("delta,fidelity,purity,raw_trace,r1,r2\n");
    for &d in deltas {
        let psi = zak_transform(&approx_codeword(&code, target, d)?, &g, cfg.mmax)?.wavefunction;
        let state = PureState::Grid(psi);
        let (r1, r2) = stabilizer_residual(&code, &state);
        let q = logical_qubit(cfg, &code, state)?;
        let _ = writeln!(
            table,
            "{d:?},{:?},{:?},{:?},{r1:?},{r2:?}",
            q.fidelity(target),
            q.purity(),
            q.raw_trace
        );
    }
    emit(cfg, "sweep", &table, stdout)
}
