use super::*;
use crate::hardy_core::sampled::{sinh_grid, uniform_grid, SampledComplexFunction, TailModel};
use crate::numerics::Complex;
use crate::quantum_states::{
    conjugate_wave, make_lorentzian_observable, make_lorentzian_state, Channel, ChannelEntry, Coefficient, EnergyWaveFunction, LorentzianSpec,
    WaveKind,
};
use crate::Error;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn spec(a: f64, b: f64, l: i64, l3: i64, coef: Complex) -> LorentzianSpec {
    LorentzianSpec {
        a,
        b,
        coefficients: vec![Coefficient {
            l,
            l3,
            re: coef.re,
            im: coef.im,
        }],
    }
}

fn broad_pair() -> (EnergyWaveFunction, EnergyWaveFunction) {
    let s = LorentzianSpec::single(2.0, 5.0, c(1.0, 0.0));
    (make_lorentzian_observable(&s).unwrap(), make_lorentzian_state(&s).unwrap())
}

#[test]
fn disjoint_channels_give_zero() {
    let st = make_lorentzian_state(&spec(2.0, 1.0, 0, 0, c(1.0, 0.0))).unwrap();
    let ob = make_lorentzian_observable(&spec(2.0, 1.0, 1, 0, c(1.0, 0.0))).unwrap();
    for t in [0.0, 1.0, 10.0] {
        let r = transition_amplitude(&ob, &st, &SMatrixModel::unit(), t, &AmplitudeOptions::default()).unwrap();
        assert_eq!(r.a, c(0.0, 0.0));
    }
    let p = transition_probability(&ob, &st, &SMatrixModel::unit(), &[0.0], &AmplitudeOptions::default()).unwrap();
    assert_eq!(p.schrodinger[0].p, 0.0);
}

#[test]
fn golden_unit_amplitude_at_zero() {
    // 10^6-node Simpson quadrature of C²/(E - 2 - 0.5i)² over (0, ∞)
    const GOLDEN: (f64, f64) = (-0.08123074680359975, 0.02030768670089997);
    let st = make_lorentzian_state(&LorentzianSpec::single(2.0, 1.0, c(1.0, 0.0))).unwrap();
    let ob = conjugate_wave(&st);
    let exact = transition_amplitude(&ob, &st, &SMatrixModel::unit(), 0.0, &AmplitudeOptions::default()).unwrap();
    assert_eq!(exact.method, AmplitudeMethod::PoleResidue);
    assert!((exact.a - c(GOLDEN.0, GOLDEN.1)).norm() < 1e-12, "{}", exact.a);
    let quad = transition_amplitude(&ob, &st, &SMatrixModel::unit(), 0.0, &AmplitudeOptions::quadrature()).unwrap();
    assert!((quad.a - c(GOLDEN.0, GOLDEN.1)).norm() < 1e-6, "{}", quad.a);
}

#[test]
fn negative_time_is_rejected() {
    let (ob, st) = broad_pair();
    assert!(matches!(
        transition_amplitude(&ob, &st, &SMatrixModel::unit(), -0.1, &AmplitudeOptions::default()),
        Err(Error::NegativeTime(_))
    ));
    assert!(matches!(
        transition_probability(&ob, &st, &SMatrixModel::unit(), &[0.0, 1.0, -1.0], &AmplitudeOptions::default()),
        Err(Error::NegativeTime(_))
    ));
}

#[test]
fn pictures_agree_and_respect_the_bound() {
    let ob = make_lorentzian_observable(&spec(2.5, 1.5, 0, 0, c(0.3, 0.8))).unwrap();
    let st = make_lorentzian_state(&spec(2.0, 1.0, 0, 0, c(1.0, 0.0))).unwrap();
    let s = SMatrixModel::single(0, SElement::resonance(2.0, 0.2).unwrap()).unwrap();
    let ts = uniform_grid(0.0, 20.0, 41);
    let r = transition_probability(&ob, &st, &s, &ts, &AmplitudeOptions::default()).unwrap();
    assert!(r.max_difference() <= 1e-8);
    for a in &r.schrodinger {
        assert!(a.p >= 0.0 && a.p <= 1.0 + a.error_estimate);
    }
}

#[test]
fn constant_phase_drops_out_of_the_modulus() {
    let (ob, st) = broad_pair();
    let ph = SMatrixModel::single(
        0,
        SElement::PhaseShift {
            delta: PhaseShift::Constant(0.7),
        },
    )
    .unwrap();
    for t in [0.0, 2.0, 9.0] {
        let a = transition_amplitude(&ob, &st, &ph, t, &AmplitudeOptions::default()).unwrap();
        let b = transition_amplitude(&ob, &st, &SMatrixModel::unit(), t, &AmplitudeOptions::default()).unwrap();
        assert!((a.a.norm() - b.a.norm()).abs() < 1e-14);
    }
}

#[test]
fn channels_add() {
    let both = LorentzianSpec {
        a: 2.0,
        b: 1.0,
        coefficients: vec![
            Coefficient {
                l: 0,
                l3: 0,
                re: 1.0,
                im: 0.0,
            },
            Coefficient {
                l: 2,
                l3: 1,
                re: 0.0,
                im: 2.0,
            },
        ],
    };
    let st = make_lorentzian_state(&both).unwrap();
    let ob = make_lorentzian_observable(&LorentzianSpec { a: 3.0, ..both.clone() }).unwrap();
    let s = SMatrixModel::single(2, SElement::resonance(2.2, 0.3).unwrap()).unwrap();
    let t = 1.7;
    let full = transition_amplitude(&ob, &st, &s, t, &AmplitudeOptions::default()).unwrap().a;
    let mut sum = c(0.0, 0.0);
    for e in st.channels() {
        let part = EnergyWaveFunction::new(WaveKind::State, vec![e.clone()]).unwrap();
        sum += transition_amplitude(&ob, &part, &s, t, &AmplitudeOptions::default()).unwrap().a;
    }
    assert!((full - sum).norm() < 1e-15);
}

#[test]
fn residue_and_quadrature_agree() {
    let (ob, st) = broad_pair();
    let s = SMatrixModel::single(0, SElement::resonance(2.0, 0.2).unwrap()).unwrap();
    for t in [0.0, 3.0, 12.0, 30.0] {
        let a = transition_amplitude(&ob, &st, &s, t, &AmplitudeOptions::pole_residue()).unwrap();
        let q = transition_amplitude(&ob, &st, &s, t, &AmplitudeOptions::quadrature()).unwrap();
        let ea = (a.p.sqrt() + q.p.sqrt()).max(1e-300);
        let bound = (a.error_estimate + q.error_estimate) / ea;
        assert!(
            (a.a - q.a).norm() <= bound.max(1e-9) + 1e-12,
            "t={t}: {} vs {} (bound {bound:e})",
            a.a,
            q.a
        );
    }
}

#[test]
fn resonance_rate_on_the_early_window() {
    let (ob, st) = broad_pair();
    let s = SMatrixModel::single(0, SElement::resonance(2.0, 0.2).unwrap()).unwrap();
    let ts = uniform_grid(0.0, 40.0, 161);
    let r = amplitude_curve(&ob, &st, &s, &ts, &AmplitudeOptions::default()).unwrap();
    let ps: Vec<f64> = r.iter().map(|a| a.p).collect();
    let fit = fit_decay_rate(&ts, &ps, 5.0, 30.0).unwrap();
    assert!((fit.rate - 0.2).abs() <= 0.05 * 0.2, "{}", fit.rate);
}

#[test]
fn sampled_channels_use_quadrature() {
    let st = make_lorentzian_state(&LorentzianSpec::single(2.0, 1.0, c(1.0, 0.0))).unwrap();
    let m = st.channels()[0].function.as_analytic().unwrap().clone();
    let cc = m.expansion().terms[0].coefficient;
    let grid: Vec<f64> = std::iter::once(0.0)
        .chain(sinh_grid(2.0, 0.25, 4000.0, 8001).into_iter().filter(|e| *e > 0.0))
        .collect();
    let samples = SampledComplexFunction::from_fn(grid, |e| m.eval(c(e, 0.0)), Some(TailModel::new(1.0, cc).unwrap())).unwrap();
    let sampled = EnergyWaveFunction::new(WaveKind::State, vec![ChannelEntry::new(Channel::new(0, 0).unwrap(), samples)]).unwrap();
    let ob = conjugate_wave(&st);
    let a = transition_amplitude(&ob, &sampled, &SMatrixModel::unit(), 2.0, &AmplitudeOptions::default()).unwrap();
    let b = transition_amplitude(&ob, &st, &SMatrixModel::unit(), 2.0, &AmplitudeOptions::default()).unwrap();
    assert_eq!(a.method, AmplitudeMethod::Quadrature);
    assert!((a.a - b.a).norm() < 1e-6, "{} vs {}", a.a, b.a);
}

#[test]
fn csv_round_trip() {
    let rows = vec![AmplitudeResult {
        t: 0.1,
        a: c(1.0 / 3.0, -2e-17),
        p: 0.1111111111111111,
        method: AmplitudeMethod::Quadrature,
        error_estimate: 1e-9,
    }];
    let mut buf = Vec::new();
    write_amplitudes_csv(&mut buf, &rows).unwrap();
    assert!(String::from_utf8_lossy(&buf).starts_with("t,re_a,im_a,p,err\n"));
    assert_eq!(read_amplitudes_csv(&buf[..]).unwrap(), rows);
}
