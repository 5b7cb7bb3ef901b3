//! Return-map properties on the three-dimensional example: shrinking the
//! initial set and the perturbation must shrink the image, and the image
//! must sit on the section.

use incluso::{
    poincare_map, systems, CrossingDirection, EnclosureSet, IVector, Interval, Representation,
    Section, SolverConfig,
};

fn rossler_image(scale: f64) -> (IVector, Interval) {
    let eps = 1e-4 * scale;
    let sys = systems::rossler(5.7, [eps; 3]);
    let x0 = IVector::from(vec![
        Interval::point(0.0),
        Interval::centered(-10.3, eps),
        Interval::centered(0.03, eps),
    ]);
    let set = EnclosureSet::quadruple(&x0);
    let mut cfg = SolverConfig::new(0.02);
    cfg.representation = Representation::Quadruple;
    let sec = Section::coordinate(0, 3, 0.0, CrossingDirection::Positive);
    poincare_map(&sys, &set, &sec, &cfg, 10_000).unwrap()
}

#[test]
fn nested_scales_shrink_the_image() {
    let (full, t_full) = rossler_image(1.0);
    let (half, t_half) = rossler_image(0.5);
    let (quarter, t_quarter) = rossler_image(0.25);
    for i in 0..3 {
        assert!(
            half[i].diam() <= full[i].diam(),
            "coordinate {i}: {} vs {}",
            half[i].diam(),
            full[i].diam()
        );
        assert!(
            quarter[i].diam() <= half[i].diam(),
            "coordinate {i}: {} vs {}",
            quarter[i].diam(),
            half[i].diam()
        );
    }
    // Crossing times are near one revolution and nested runs stay close.
    assert!(t_full.lo() > 3.0 && t_full.hi() < 12.0, "{t_full:?}");
    assert!((t_half.mid() - t_full.mid()).abs() < 0.5);
    assert!((t_quarter.mid() - t_half.mid()).abs() < 0.5);
    // The image lies on the section x₁ = 0.
    let sec = Section::coordinate(0, 3, 0.0, CrossingDirection::Positive);
    assert!(sec.alpha(&full).contains(0.0));
    assert!(sec.alpha(&quarter).contains(0.0));
}
