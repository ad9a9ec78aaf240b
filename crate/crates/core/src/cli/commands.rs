use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::ensemble_time::{
    compare_to_theory, event_grid, read_events_csv, sample_decay_ensemble, survival_curve, validate_records, write_events_csv,
};
use crate::error::{Error, Result};
use crate::hardy_core::causal::{causal_transform, causal_transform_sampled, CausalOptions};
use crate::hardy_core::criterion::{hardy_criterion, CriterionConfig};
use crate::hardy_core::function::ComplexFunction;
use crate::hardy_core::hilbert::{dispersion_residual, fit_dispersion_tail, hilbert_transform};
use crate::hardy_core::sampled::{fit_edge_tail, uniform_grid, Part, SampledComplexFunction};
use crate::numerics::QuadratureSpec;
use crate::quantum_states::{energy_distribution, evolve_observable, evolve_state, make_lorentzian_observable, make_lorentzian_state};
use crate::transition::{amplitude_curve, fit_decay_rate};

use super::config::{load, set, set_opt, CausalConfig, CompareConfig, DecayConfig, EnsembleConfig, EvolveConfig, HardyCheckConfig, KkConfig};
use super::{Command, Format, Outcome};

pub(crate) fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match cmd {
        Command::KkCheck {
            common,
            input,
            half_plane,
            tolerance,
        } => {
            let mut c: KkConfig = load(common.config.as_deref())?;
            set_opt(&mut c.input, input);
            set_opt(&mut c.output, common.output);
            set(&mut c.half_plane, half_plane.map(Into::into));
            set(&mut c.tolerance, tolerance);
            echo(err, "kk-check", &c)?;
            kk_check(&c, out, err)
        }
        Command::CausalTransform {
            common,
            input,
            signal,
            omega_min,
            omega_max,
            omega_points,
            format,
        } => {
            let mut c: CausalConfig = load(common.config.as_deref())?;
            set_opt(&mut c.input, input);
            set_opt(&mut c.output, common.output);
            if let Some(s) = signal {
                c.signal = Some(serde_json::from_str(&s)?);
            }
            set(&mut c.omega_min, omega_min);
            set(&mut c.omega_max, omega_max);
            set(&mut c.omega_points, omega_points);
            set(&mut c.format, format);
            echo(err, "causal-transform", &c)?;
            causal(&c, out)
        }
        Command::HardyCheck {
            common,
            input,
            model,
            half_plane,
            offsets,
        } => {
            let mut c: HardyCheckConfig = load(common.config.as_deref())?;
            set_opt(&mut c.input, input);
            set_opt(&mut c.output, common.output);
            if let Some(m) = model {
                c.model = Some(serde_json::from_str(&m)?);
            }
            set(&mut c.half_plane, half_plane.map(Into::into));
            set(&mut c.offsets, offsets);
            echo(err, "hardy-check", &c)?;
            hardy_check(&c, out)
        }
        Command::Evolve {
            common,
            t,
            observable,
            distribution_points,
        } => {
            let mut c: EvolveConfig = load(common.config.as_deref())?;
            set_opt(&mut c.output, common.output);
            set(&mut c.t, t);
            c.observable |= observable;
            set_opt(&mut c.distribution_points, distribution_points);
            echo(err, "evolve", &c)?;
            evolve(&c, out)
        }
        Command::Decay {
            common,
            t_min,
            t_max,
            t_points,
            fit,
            fit_lo,
            fit_hi,
            format,
        } => {
            let mut c: DecayConfig = load(common.config.as_deref())?;
            set_opt(&mut c.output, common.output);
            set(&mut c.t_min, t_min);
            set(&mut c.t_max, t_max);
            set(&mut c.t_points, t_points);
            c.fit |= fit;
            set(&mut c.fit_lo, fit_lo);
            set(&mut c.fit_hi, fit_hi);
            set(&mut c.format, format);
            echo(err, "decay", &c)?;
            decay(&c, out)
        }
        Command::Ensemble {
            common,
            rate,
            n,
            seed,
            survival,
            format,
        } => {
            let mut c: EnsembleConfig = load(common.config.as_deref())?;
            set_opt(&mut c.output, common.output);
            set(&mut c.rate, rate);
            set(&mut c.n, n);
            set(&mut c.seed, seed);
            set_opt(&mut c.survival, survival);
            set(&mut c.format, format);
            echo(err, "ensemble", &c)?;
            ensemble(&c, out)
        }
        Command::Compare {
            common,
            events,
            theory,
            rate,
            threshold,
        } => {
            let mut c: CompareConfig = load(common.config.as_deref())?;
            set_opt(&mut c.output, common.output);
            set_opt(&mut c.events, events);
            set_opt(&mut c.theory, theory);
            set_opt(&mut c.rate, rate);
            set(&mut c.threshold, threshold);
            echo(err, "compare", &c)?;
            compare(&c, out)
        }
    }
}

fn echo<T: Serialize>(err: &mut dyn Write, name: &str, cfg: &T) -> Result<()> {
    writeln!(err, "# {name} config: {}", serde_json::to_string(cfg)?)?;
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn required<'a>(p: &'a Option<std::path::PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::InvalidSpec(format!("{what} is required")))
}

/// Runs `body` against the output file, or stdout when none is set.
fn with_output(path: &Option<std::path::PathBuf>, out: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(out),
    }
}

fn read_samples(path: &Path) -> Result<SampledComplexFunction> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    SampledComplexFunction::from_csv(text.as_bytes(), None)
}

#[derive(Serialize)]
struct KkReport {
    residual: f64,
    tolerance: f64,
    passed: bool,
    points: usize,
}

fn kk_check(c: &KkConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let f = read_samples(required(&c.input, "input")?)?;
    let tail = fit_dispersion_tail(&f).ok_or_else(|| Error::MissingTailModel("no power-law decay found at the grid edges".into()))?;
    let f = f.with_tail(Some(tail))?;
    let spec = QuadratureSpec::adaptive(c.abs_tol, c.tolerance);
    let residual = dispersion_residual(&f, c.half_plane, &spec)?;
    let im_only = f.map(|_, v| Part::Im.embed(v.im));
    let rebuilt = hilbert_transform(&im_only, Part::Im, c.half_plane, &spec)?;
    with_output(&c.output, out, |w| rebuilt.to_csv(w))?;
    let passed = residual <= c.tolerance;
    writeln!(
        err,
        "{}",
        serde_json::to_string(&KkReport {
            residual,
            tolerance: c.tolerance,
            passed,
            points: f.len()
        })?
    )?;
    Ok(if passed {
        Outcome::Ok
    } else {
        Outcome::Violation(format!("dispersion residual {residual:e} exceeds {:e}", c.tolerance))
    })
}

fn causal(c: &CausalConfig, out: &mut dyn Write) -> Result<Outcome> {
    if c.omega_points < 2 || !(c.omega_max > c.omega_min) {
        return Err(Error::InvalidValue(
            "frequency grid needs omega_max > omega_min and 2 or more points".into(),
        ));
    }
    let omegas = uniform_grid(c.omega_min, c.omega_max, c.omega_points);
    let h = match (&c.signal, &c.input) {
        (Some(sig), None) => {
            let m = causal_transform(sig)?;
            if c.format == Format::Json {
                with_output(&c.output, out, |w| Ok(writeln!(w, "{}", m.to_json()?)?))?;
                return Ok(Outcome::Ok);
            }
            SampledComplexFunction::from_fn(omegas, |w| m.eval(crate::numerics::Complex::new(w, 0.0)), None)?
        }
        (None, Some(path)) => {
            let f = read_samples(path)?;
            let f = match (f.tail(), c.exponential_tail) {
                (None, None) => f.clone().with_tail(fit_edge_tail(&f).filter(|t| t.p > 1.0))?,
                _ => f,
            };
            let opts = CausalOptions {
                switch_threshold: c.switch_threshold,
                exponential_tail: c.exponential_tail,
            };
            causal_transform_sampled(&f, &omegas, &opts)?
        }
        _ => return Err(Error::InvalidSpec("exactly one of signal and input is required".into())),
    };
    with_output(&c.output, out, |w| match c.format {
        Format::Csv => h.to_csv(w),
        Format::Json => Ok(writeln!(w, "{}", h.to_json()?)?),
    })?;
    Ok(Outcome::Ok)
}

fn hardy_check(c: &HardyCheckConfig, out: &mut dyn Write) -> Result<Outcome> {
    let f: ComplexFunction = match (&c.model, &c.input) {
        (Some(m), None) => m.clone().into(),
        (None, Some(p)) => {
            let f = read_samples(p)?;
            let tail = fit_edge_tail(&f).ok_or_else(|| Error::MissingTailModel("no power-law decay found at the grid edges".into()))?;
            f.with_tail(Some(tail))?.into()
        }
        _ => return Err(Error::InvalidSpec("exactly one of model and input is required".into())),
    };
    let r = hardy_criterion(&f, c.half_plane, &c.offsets, &CriterionConfig::default())?;
    with_output(&c.output, out, |w| Ok(writeln!(w, "{}", serde_json::to_string(&r)?)?))?;
    Ok(if r.passed {
        Outcome::Ok
    } else {
        Outcome::Violation(format!("Hardy criterion fails: {}", r.notes.join("; ")))
    })
}

fn evolve(c: &EvolveConfig, out: &mut dyn Write) -> Result<Outcome> {
    let w = if c.observable {
        evolve_observable(&make_lorentzian_observable(&c.spec)?, c.t)?
    } else {
        evolve_state(&make_lorentzian_state(&c.spec)?, c.t)?
    };
    with_output(&c.output, out, |o| match c.distribution_points {
        None => Ok(writeln!(o, "{}", w.to_json()?)?),
        Some(n) => {
            let grid = uniform_grid(0.0, c.e_max, n.max(2));
            let (d, norm) = energy_distribution(&w, &grid)?;
            writeln!(o, "E,f")?;
            for (e, v) in grid.iter().zip(d) {
                writeln!(o, "{e},{v}")?;
            }
            writeln!(o, "# norm={norm}")?;
            Ok(())
        }
    })?;
    Ok(Outcome::Ok)
}

fn decay(c: &DecayConfig, out: &mut dyn Write) -> Result<Outcome> {
    let ts = c.times()?;
    let obs = make_lorentzian_observable(&c.observable)?;
    let st = make_lorentzian_state(&c.state)?;
    let rows = amplitude_curve(&obs, &st, &c.smatrix, &ts, &c.amplitude)?;
    let fit = if c.fit {
        let ps: Vec<f64> = rows.iter().map(|r| r.p).collect();
        Some(fit_decay_rate(&ts, &ps, c.fit_lo, c.fit_hi)?)
    } else {
        None
    };
    with_output(&c.output, out, |w| {
        match c.format {
            Format::Csv => {
                writeln!(w, "t,p,err")?;
                for r in &rows {
                    writeln!(w, "{},{},{}", r.t, r.p, r.error_estimate)?;
                }
                if let Some(f) = &fit {
                    writeln!(w, "# fit rate={} amplitude={}", f.rate, f.amplitude)?;
                    writeln!(w, "# fit window t_lo={} t_hi={} points={}", f.t_lo, f.t_hi, f.points)?;
                }
            }
            Format::Json => {
                #[derive(Serialize)]
                struct Doc<'a> {
                    results: &'a [crate::transition::AmplitudeResult],
                    fit: Option<crate::transition::ExponentialFit>,
                }
                writeln!(w, "{}", serde_json::to_string(&Doc { results: &rows, fit })?)?;
            }
        }
        Ok(())
    })?;
    Ok(Outcome::Ok)
}

fn ensemble(c: &EnsembleConfig, out: &mut dyn Write) -> Result<Outcome> {
    let recs = sample_decay_ensemble(c.rate, c.n, &c.scheme, c.seed)?;
    with_output(&c.output, out, |w| match c.format {
        Format::Csv => write_events_csv(w, &recs),
        Format::Json => Ok(writeln!(w, "{}", serde_json::to_string(&recs)?)?),
    })?;
    if let Some(p) = &c.survival {
        let curve = survival_curve(&recs, &event_grid(&recs)?)?;
        with_output(&Some(p.clone()), out, |w| curve.write_csv(w))?;
    }
    Ok(Outcome::Ok)
}

/// Reads the `t` and `p` columns of a theory CSV; `#` lines are skipped.
fn read_theory(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let header = rd
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("theory CSV has no `{name}` column"),
        })
    };
    let (jt, jp) = (col("t")?, col("p")?);
    let (mut ts, mut ps) = (Vec::new(), Vec::new());
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let num = |j: usize| {
            rec.get(j).unwrap_or("").parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        };
        ts.push(num(jt)?);
        ps.push(num(jp)?);
    }
    Ok((ts, ps))
}

fn compare(c: &CompareConfig, out: &mut dyn Write) -> Result<Outcome> {
    let recs = validate_records(&read_events_csv(open(required(&c.events, "events")?)?)?)?;
    let (ts, ps) = match (&c.theory, c.rate) {
        (Some(p), None) => read_theory(p)?,
        (None, Some(r)) => {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidRate(r));
            }
            (c.t_grid.clone(), c.t_grid.iter().map(|t| (-r * t).exp()).collect())
        }
        _ => return Err(Error::InvalidSpec("exactly one of theory and rate is required".into())),
    };
    let report = compare_to_theory(&recs, &ps, &ts)?;
    with_output(&c.output, out, |w| Ok(writeln!(w, "{}", serde_json::to_string(&report)?)?))?;
    Ok(if report.consistent(c.threshold) {
        Outcome::Ok
    } else {
        Outcome::Violation(format!("max |z| = {} exceeds {}", report.max_abs_z, c.threshold))
    })
}
