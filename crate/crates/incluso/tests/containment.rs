//! Monte-Carlo containment: sampled true trajectories must stay inside the
//! rigorous enclosures at every step.

use incluso::inclusion::{inclusion_step, integrate_trace};
use incluso::{systems, EnclosureSet, IVector, Interval, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample_in(rng: &mut ChaCha8Rng, box_: &IVector) -> Vec<f64> {
    box_.iter()
        .map(|c| {
            if c.diam() == 0.0 {
                c.lo()
            } else {
                rng.gen_range(c.lo()..=c.hi())
            }
        })
        .collect()
}

#[test]
fn one_step_cloud_stays_inside() {
    let sys = systems::harmonic_oscillator(0.1, 0.1);
    let x0 = IVector::from(vec![Interval::new(0.9, 1.1), Interval::new(-0.1, 0.1)]);
    let set = EnclosureSet::doubleton(&x0);
    let cfg = SolverConfig::new(0.1);
    let bundle = inclusion_step(&sys, &set, 0.0, &cfg).unwrap();
    let hull = bundle.set_next.hull();

    let f = |_t: f64, x: &[f64]| vec![x[1], -x[0]];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let p = sample_in(&mut rng, &x0);
        let q = incluso_oracle::rk4_integrate(&f, 0.0, &p, 0.1 / 32.0, 32);
        assert!(hull.contains_point(&q), "{p:?} -> {q:?} vs {hull:?}");
        assert!(bundle.ek.contains_point(&q));
        assert!(bundle.ek.contains_point(&p));
    }
}

#[test]
fn oscillator_selections_stay_inside_over_fifty_steps() {
    let sys = systems::harmonic_oscillator(0.1, 0.1);
    let h = 0.1;
    let x0 = IVector::from(vec![
        Interval::centered(1.0, 0.05),
        Interval::centered(0.0, 0.05),
    ]);
    let set = EnclosureSet::doubleton(&x0);
    let cfg = SolverConfig::new(h);
    let trace = integrate_trace(&sys, &set, 0.0, 50, &cfg).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let start = sample_in(&mut rng, &x0);
        for _ in 0..10 {
            // A fresh piecewise-constant selection of the perturbation,
            // redrawn on every step interval.
            let mut rng_sel = ChaCha8Rng::seed_from_u64(rng.gen());
            let mut x = start.clone();
            for (k, bundle) in trace.iter().enumerate() {
                let y = [rng_sel.gen_range(-0.1..=0.1), rng_sel.gen_range(-0.1..=0.1)];
                let f = |_t: f64, s: &[f64]| vec![s[1] + y[0], -s[0] + y[1]];
                x = incluso_oracle::rk4_integrate(&f, k as f64 * h, &x, h / 8.0, 8);
                let hull = bundle.set_next.hull();
                assert!(hull.contains_point(&x), "step {k}: {x:?} vs {hull:?}");
            }
        }
    }
}

#[test]
fn rossler_selections_stay_inside_over_fifty_steps() {
    let eps = 1e-4;
    let sys = systems::rossler(5.7, [eps; 3]);
    let h = 0.02;
    let x0 = IVector::from(vec![
        Interval::point(0.0),
        Interval::centered(-10.3, eps),
        Interval::centered(0.03, eps),
    ]);
    let set = EnclosureSet::quadruple(&x0);
    let mut cfg = SolverConfig::new(h);
    cfg.representation = incluso::Representation::Quadruple;
    let trace = integrate_trace(&sys, &set, 0.0, 50, &cfg).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..20 {
        let start = sample_in(&mut rng, &x0);
        for _ in 0..10 {
            let mut rng_sel = ChaCha8Rng::seed_from_u64(rng.gen());
            let mut x = start.clone();
            for (k, bundle) in trace.iter().enumerate() {
                let y = [
                    rng_sel.gen_range(-eps..=eps),
                    rng_sel.gen_range(-eps..=eps),
                    rng_sel.gen_range(-eps..=eps),
                ];
                let f = |_t: f64, s: &[f64]| {
                    vec![
                        -(s[1] + s[2]) + y[0],
                        s[0] + 0.2 * s[1] + y[1],
                        0.2 + s[2] * (s[0] - 5.7) + y[2],
                    ]
                };
                x = incluso_oracle::rk4_integrate(&f, k as f64 * h, &x, h / 8.0, 8);
                let hull = bundle.set_next.hull();
                assert!(hull.contains_point(&x), "step {k}: {x:?} vs {hull:?}");
            }
        }
    }
}
