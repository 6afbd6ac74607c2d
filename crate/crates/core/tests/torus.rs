use polygreen::euclid::{ProblemParams, RadialKernel};
use polygreen::giraud::radial_convolve;
use polygreen::quad::QuadOptions;
use polygreen::torus::{
    finite_difference_gradient, green_gradient, random_pairs, random_pairs_at_distance, symmetry_positivity_scan,
    three_regime_bound, torus_distance, LatticeSum, TorusField, TorusGeometry,
};

fn unit(n: u32) -> TorusGeometry {
    TorusGeometry::new(n, 1.0).unwrap()
}

#[test]
fn biharmonic_factors_through_the_torus() {
    // G^(2) on T^5 is the lattice sum of G1 ⋆ G1, i.e. the torus convolution of G^(1) with itself.
    let alpha = 400.0;
    let g1 = ProblemParams::new(5, 1, alpha).unwrap();
    let g2 = ProblemParams::new(5, 2, alpha).unwrap();
    let geometry = unit(5);
    let kernel = RadialKernel::green(g1);
    let opts = QuadOptions::tight(1e-16, 1e-9);
    let direct = LatticeSum::new(g2, geometry, 1e-14, 0).unwrap();
    let lattice = LatticeSum::new(g1, geometry, 1e-10, 0).unwrap();
    for v in [[0.3, 0.0, 0.0, 0.0, 0.0], [0.2, -0.25, 0.1, 0.0, 0.05]] {
        let mut sum = 0.0;
        for w in lattice.images() {
            let r = v.iter().zip(w).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
            if r <= 1.6 {
                sum += radial_convolve(&kernel, &kernel, 5, r, opts).unwrap().value;
            }
        }
        let expected = direct.sum_displacement(&v).unwrap().value;
        assert!((sum / expected - 1.0).abs() < 1e-6, "{sum} vs {expected}");
    }
}

#[test]
fn translation_invariant() {
    let p = ProblemParams::new(3, 1, 50.0).unwrap();
    let g = unit(3);
    let lattice = LatticeSum::new(p, g, 1e-13, 0).unwrap();
    let x = [0.1, 0.7, 0.35];
    let y = [0.9, 0.2, 0.5];
    let base = lattice.value(&x, &y).unwrap().value;
    for s in [[0.25, 0.0, 0.0], [0.5, 0.5, 0.5], [0.93, 0.11, 0.47]] {
        let xs: Vec<f64> = x.iter().zip(&s).map(|(a, b)| g.wrap(a + b)).collect();
        let ys: Vec<f64> = y.iter().zip(&s).map(|(a, b)| g.wrap(a + b)).collect();
        let moved = lattice.value(&xs, &ys).unwrap().value;
        assert!((moved - base).abs() <= 1e-12 * base, "{moved} vs {base}");
    }
}

#[test]
fn field_file_round_trip() {
    let g = TorusGeometry::new(3, 2.0).unwrap();
    let f = TorusField::sample(g, 8, |y| y[0] - 0.5 * y[1] * y[2]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.tfld");
    f.write_tfld(std::fs::File::create(&path).unwrap()).unwrap();
    let back = TorusField::read_tfld(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back.values, f.values);
    assert_eq!(back.m, 8);
    assert_eq!(back.geometry, g);
}

#[test]
fn truncated_field_file_is_rejected() {
    let f = TorusField::sample(unit(2), 4, |y| y[0]).unwrap();
    let mut bytes = Vec::new();
    f.write_tfld(&mut bytes).unwrap();
    bytes.truncate(bytes.len() - 3);
    assert!(TorusField::read_tfld(bytes.as_slice()).is_err());
}

#[test]
fn seeded_sampling_is_reproducible() {
    let g = unit(3);
    assert_eq!(random_pairs(&g, 20, 5), random_pairs(&g, 20, 5));
    assert_ne!(random_pairs(&g, 20, 5), random_pairs(&g, 20, 6));
    for (x, y) in random_pairs_at_distance(&g, 50, 0.1, 0.2, 3).unwrap() {
        let (d, _) = torus_distance(&g, &x, &y);
        assert!((0.1 - 1e-12..=0.2 + 1e-12).contains(&d), "{d}");
    }
    assert!(random_pairs_at_distance(&g, 5, 0.1, 0.7, 0).is_err());
}

#[test]
fn scan_passes_for_the_yukawa_torus() {
    let p = ProblemParams::new(3, 1, 100.0).unwrap();
    let g = unit(3);
    let report = symmetry_positivity_scan(p, g, &random_pairs(&g, 100, 1), 1e-14).unwrap();
    assert!(report.pass);
    assert!(report.min_value > 0.0);
    assert!(report.counterexample.is_none());
}

#[test]
fn gradient_matches_differences_in_dimension_five() {
    let p = ProblemParams::new(5, 2, 30.0).unwrap();
    let lattice = LatticeSum::new(p, unit(5), 1e-13, 1).unwrap();
    let x = [0.1, 0.2, 0.3, 0.4, 0.5];
    let y = [0.3, 0.05, 0.45, 0.6, 0.35];
    let exact = green_gradient(&lattice, &x, &y).unwrap();
    let fd = finite_difference_gradient(&lattice, &x, &y, 1e-4).unwrap();
    let scale = exact.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    for (a, b) in exact.iter().zip(&fd) {
        assert!((a - b).abs() <= 1e-6 * scale, "{a} vs {b}");
    }
}

#[test]
fn three_regime_bound_regimes() {
    let ig = 0.5;
    // Near: pure power.
    assert_eq!(three_regime_bound(100.0, 0.05, 1.0, 0.1, ig), 20.0);
    // Intermediate: power times exponential.
    let mid = three_regime_bound(100.0, 0.2, 1.0, 0.1, ig);
    assert!((mid - 5.0 * (-0.9f64 * 2.0).exp()).abs() < 1e-14);
    // Far: constant at the saturation level.
    let far = three_regime_bound(100.0, 0.4, 1.0, 0.1, ig);
    assert_eq!(far, three_regime_bound(100.0, 0.6, 1.0, 0.1, ig));
}
