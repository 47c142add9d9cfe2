use fsi_core::InputSignal;

/// Composite Simpson rule for `∫u²` with step `1e-3`.
fn simpson_sq(sig: &InputSignal, t_end: f64) -> f64 {
    let n = 2 * (t_end / 2e-3).round() as usize;
    let h = t_end / n as f64;
    let f = |t: f64| sig.eval(t).unwrap().powi(2);
    let inner: f64 = (1..n)
        .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h))
        .sum();
    h / 3.0 * (inner + f(0.0) + f(t_end))
}

#[test]
fn smooth_inputs_match_closed_form_l2() {
    let signals = [
        InputSignal::ExpDecay {
            a: 0.5,
            lambda: 1.0,
        },
        InputSignal::ExpDecay {
            a: -2.0,
            lambda: 3.0,
        },
        InputSignal::PowerTail { a: 1.0, p: 0.75 },
        InputSignal::PowerTail { a: 0.3, p: 2.0 },
    ];
    for sig in &signals {
        for t in [0.5, 2.0, 10.0] {
            let exact = sig.l2_norm(Some(t)).powi(2);
            let num = simpson_sq(sig, t);
            assert!(
                ((num - exact) / exact).abs() <= 1e-6,
                "{sig:?} T={t}: {num} vs {exact}"
            );
        }
    }
}

#[test]
fn piecewise_constant_inputs_integrate_exactly_on_aligned_grids() {
    let sig = InputSignal::Sampled {
        times: vec![0.0, 0.5, 1.5, 3.0],
        values: vec![1.0, -0.5, 0.25],
    };
    let exact = 0.5 + 0.25 + 1.5 * 0.0625;
    assert!((sig.l2_norm_sq(None) - exact).abs() < 1e-15);
    assert!((sig.l2_norm_sq(Some(1.0)) - 0.625).abs() < 1e-15);
    let pulse = InputSignal::RectPulse {
        a: 2.0,
        t0: 1.0,
        t1: 3.0,
    };
    assert_eq!(pulse.l2_norm_sq(Some(2.0)), 4.0);
    assert_eq!(pulse.l1_norm(None), 4.0);
}
