//! Library results against independently computed reference values.

use framekit::extraction::{extract_biorthogonal, extract_frame, StopReason};
use framekit::frame::{check_counting_lemmas, DEFAULT_TOLERANCE};
use framekit::gallery::quadrature::cosine_moment;
use framekit::gallery::{
    duplicated, find_flat_vector, lemma51, perturbed_pairs, weighted_exponential_gram,
    weighted_exponentials, Sign,
};
use framekit::linalg::{real, CMatrix, CVector};
use framekit::metrics::{
    basis_metrics, equivalence_constant, riesz_constant, schauder_basis_constant,
    separation_constant, ExtReal,
};
use framekit::selection::select_exhaustive;
use framekit::system::VectorSystem;
use framekit::{frame_report, power_transform};

/// `int_{-pi}^{pi} |x|^p cos(kx) dx` from the incomplete gamma closed form
/// `2 Re[(-ik)^-(p+1) gamma(p+1, -ik pi)]`, evaluated at 50 digits.
#[allow(clippy::excessive_precision)]
const MOMENTS: [(f64, u32, f64); 5] = [
    (-0.5, 3, 1.466425885468288896287),
    (0.5, 7, -0.07916912718586750464752),
    (0.9, 40, -0.0007138297872200667426416),
    (-0.9, 5, 16.00703743833365556318),
    (0.5, 1, -1.789662938968289517075),
];

#[test]
fn quadrature_matches_high_precision_values() {
    for (p, k, want) in MOMENTS {
        let (half, estimate) = cosine_moment(p, k).unwrap();
        let got = 2.0 * half;
        assert!(
            (got - want).abs() <= 1e-10 * want.abs().max(1.0),
            "p = {p}, k = {k}: {got} vs {want}"
        );
        assert!(estimate < 1e-8);
    }
}

/// Distance from `f_j` to the span of the others by normal equations.
fn projection_separation(sys: &VectorSystem) -> f64 {
    let m = sys.count();
    (0..m)
        .map(|j| {
            let others: Vec<usize> = (0..m).filter(|&i| i != j).collect();
            let a = sys.subsystem(&others).unwrap().into_matrix();
            let v = sys.vector(j);
            let coeffs = (a.adjoint() * &a).lu().solve(&(a.adjoint() * &v)).unwrap();
            (v - a * coeffs).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn separation_matches_projection_route() {
    let pair = perturbed_pairs(10).unwrap().subsystem(&[0, 1]).unwrap();
    let d = separation_constant(&pair).unwrap();
    assert!((d - 0.1 / 1.01f64.sqrt()).abs() < 1e-12);
    for sys in [
        perturbed_pairs(4).unwrap(),
        weighted_exponentials(0.25, 6, Sign::Minus, true).unwrap(),
        lemma51(7)
            .unwrap()
            .subsystem(&[0, 1, 2, 3, 4, 5, 7])
            .unwrap(),
    ] {
        let want = projection_separation(&sys);
        let got = separation_constant(&sys).unwrap();
        assert!(
            (got - want).abs() < 1e-9 * want.max(1e-3),
            "{got} vs {want}"
        );
    }
    assert_eq!(
        separation_constant(&duplicated(3, false).unwrap()).unwrap(),
        0.0
    );
}

#[test]
fn perturbed_pairs_are_badly_conditioned() {
    let sys = perturbed_pairs(10).unwrap();
    let d = separation_constant(&sys).unwrap();
    assert!((d - 0.0995).abs() < 1e-4, "{d}");
    for keep in [vec![0, 1], vec![0, 1, 2], vec![0, 1, 4, 5]] {
        let m = riesz_constant(&sys.subsystem(&keep).unwrap()).to_f64();
        assert!(m >= 14.0, "{keep:?}: {m}");
    }
    for n in [5, 10, 20] {
        let m = riesz_constant(&perturbed_pairs(n).unwrap()).to_f64();
        assert!(m >= n as f64, "n = {n}: {m}");
    }
}

#[test]
fn schauder_constant_of_near_pair() {
    let pair = perturbed_pairs(10).unwrap().subsystem(&[0, 1]).unwrap();
    let k = schauder_basis_constant(&pair, &[0, 1]).unwrap().to_f64();
    assert!((k - 101f64.sqrt()).abs() < 1e-9, "{k}");
    // the order matters for a conditional system
    let sys = weighted_exponentials(0.25, 6, Sign::Minus, true).unwrap();
    let natural: Vec<usize> = (0..sys.count()).collect();
    let mut shuffled = natural.clone();
    shuffled.reverse();
    shuffled.swap(0, 5);
    let a = schauder_basis_constant(&sys, &natural).unwrap().to_f64();
    let b = schauder_basis_constant(&sys, &shuffled).unwrap().to_f64();
    assert!((a - b).abs() > 1e-3, "{a} vs {b}");
}

#[test]
fn equivalence_with_canonical_tight_frame() {
    let onb = VectorSystem::orthonormal(3).unwrap();
    let doubled = VectorSystem::new(CMatrix::identity(3, 3).scale(2.0)).unwrap();
    assert!((equivalence_constant(&onb, &doubled).unwrap().to_f64() - 2.0).abs() < 1e-12);
    assert!((equivalence_constant(&onb, &onb).unwrap().to_f64() - 1.0).abs() < 1e-12);

    // G = T F with F spanning: K = max(sigma_max(T), 1 / sigma_min(T))
    let sys = framekit::gallery::random_frame(4, 7, 5, 50.0).unwrap();
    let t = CMatrix::from_diagonal(&CVector::from_vec([2.0, 1.0, 0.5, 3.0].map(real).to_vec()));
    let k = equivalence_constant(&sys, &sys.mapped(&t).unwrap())
        .unwrap()
        .to_f64();
    assert!((k - 3.0).abs() < 1e-9, "{k}");
    let t = CMatrix::from_diagonal(&CVector::from_vec([1.0, 0.25, 1.5, 1.0].map(real).to_vec()));
    let k = equivalence_constant(&sys, &sys.mapped(&t).unwrap())
        .unwrap()
        .to_f64();
    assert!((k - 4.0).abs() < 1e-9, "{k}");

    let tight = power_transform(&sys, 0.0, DEFAULT_TOLERANCE).unwrap();
    let r = frame_report(&sys, DEFAULT_TOLERANCE);
    let want = r.upper_bound.sqrt().max(1.0 / r.lower_bound.sqrt());
    let k = equivalence_constant(&sys, &tight).unwrap().to_f64();
    assert!((k - want).abs() < 1e-9 * want, "{k} vs {want}");
}

#[test]
fn counting_lemma_examples() {
    let onb = check_counting_lemmas(&VectorSystem::orthonormal(6).unwrap(), 1e-10).unwrap();
    assert!(onb.lower_bound_slack.unwrap().abs() < 1e-12 && onb.upper_bound_slack.abs() < 1e-12);

    let sys = lemma51(10).unwrap();
    let beta = sys.norms().into_iter().fold(0.0, f64::max);
    let s = check_counting_lemmas(&sys, 1e-10).unwrap();
    assert!((s.lower_bound_slack.unwrap() - (beta * beta * 11.0 - 10.0)).abs() < 1e-9);

    let dup = check_counting_lemmas(&duplicated(2, false).unwrap(), 1e-10).unwrap();
    assert!(dup.upper_bound_slack.abs() < 1e-12);
}

/// Smallest eigenvalue of the normalized positive-exponent Gram, a = 0.25,
/// from an independent dense-quadrature computation.
const PLUS_BOTTOM: [(usize, f64); 3] = [(8, 0.2796), (16, 0.2014), (32, 0.1438)];

#[test]
fn exponential_gram_trends() {
    for (order, want) in PLUS_BOTTOM {
        let sys = weighted_exponentials(0.25, order, Sign::Plus, true).unwrap();
        let sigma_min = *basis_metrics(&sys).singular_values.last().unwrap();
        assert!(
            (sigma_min * sigma_min - want).abs() < 1e-3,
            "N = {order}: {}",
            sigma_min * sigma_min
        );
    }
    let mut previous = f64::INFINITY;
    for order in [8, 16, 32] {
        let sys = weighted_exponentials(0.45, order, Sign::Plus, true).unwrap();
        let mass = find_flat_vector(&sys, 1.0).unwrap().mass;
        assert!(mass < previous);
        previous = mass;
    }
    let minus = weighted_exponentials(0.25, 16, Sign::Minus, true).unwrap();
    let bottom = basis_metrics(&minus)
        .singular_values
        .last()
        .unwrap()
        .powi(2);
    assert!((0.45..0.55).contains(&bottom), "{bottom}");
}

#[test]
fn gram_is_hermitian_with_closed_form_diagonal() {
    let g = weighted_exponential_gram(0.3, 5, Sign::Minus).unwrap();
    assert!((&g - g.adjoint()).norm() < 1e-12);
    let p: f64 = -0.6;
    let mass = 2.0 * std::f64::consts::PI.powf(p + 1.0) / (p + 1.0);
    assert!((g[(3, 3)].re - mass).abs() < 1e-9 * mass);
    // a = 0 recovers plain exponentials: 2 pi times the identity
    let plain = weighted_exponential_gram(0.0, 3, Sign::Plus).unwrap();
    assert!((plain - CMatrix::identity(7, 7).scale(2.0 * std::f64::consts::PI)).norm() < 1e-9);
}

/// Riesz constant of the `sigma_min`-optimal `k`-subset, by exhaustive search.
fn exhaustive_riesz(sys: &VectorSystem, k: usize) -> f64 {
    let best = select_exhaustive(sys, k).unwrap();
    riesz_constant(&sys.subsystem(&best.subset).unwrap()).to_f64()
}

#[test]
fn frame_extraction_against_exhaustive_calibration() {
    let calibration = exhaustive_riesz(&lemma51(10).unwrap(), 8);
    let trace = extract_frame(&lemma51(40).unwrap(), 0.25, 0.1, None).unwrap();
    assert!(trace.selected_count() >= 30);
    let m = trace.final_riesz_constant.to_f64();
    assert!(m <= 2.0 * calibration, "{m} vs 2 x {calibration}");
}

#[test]
fn frame_extraction_on_duplicated_basis() {
    let sys = duplicated(10, false).unwrap();
    let trace = extract_frame(&sys, 0.2, 0.1, None).unwrap();
    assert!(trace.selected_count() >= 8);
    assert!(trace.final_riesz_constant.to_f64() <= 2f64.sqrt() + 1e-12);

    let onb = VectorSystem::orthonormal(7).unwrap();
    let trace = extract_frame(&onb, 0.6, 0.1, None).unwrap();
    assert_eq!(trace.stop_reason, StopReason::CoverageReached);
    assert!((trace.final_riesz_constant.to_f64() - 1.0).abs() < 1e-12);
}

#[test]
fn biorthogonal_extraction_drops_a_near_parallel_vector() {
    let mut m = CMatrix::identity(10, 10);
    m[(0, 1)] = real(1.0);
    m[(1, 1)] = real(0.1);
    let sys = VectorSystem::new(m).unwrap();
    let trace = extract_biorthogonal(&sys, 0.2, 0.1).unwrap();
    let s = &trace.final_subset;
    assert!(!(s.contains(&0) && s.contains(&1)), "{s:?}");
    assert!(s.len() >= 8);
    let m = trace.final_riesz_constant.to_f64();
    // oracle: the best 9-subset drops one vector of the pair and is orthonormal
    assert!((exhaustive_riesz(&sys, 9) - 1.0).abs() < 1e-12);
    assert!(m <= 2.0, "{m}");
}

#[test]
fn biorthogonal_extraction_on_exponentials() {
    let calibration = exhaustive_riesz(
        &weighted_exponentials(0.25, 12, Sign::Minus, true).unwrap(),
        19,
    );
    let sys = weighted_exponentials(0.25, 32, Sign::Minus, true).unwrap();
    let trace = extract_biorthogonal(&sys, 0.25, 0.1).unwrap();
    assert!(trace.selected_count() >= 49, "{}", trace.selected_count());
    let m = trace.final_riesz_constant.to_f64();
    assert!(m <= 2.0 * calibration, "{m} vs {calibration}");
}

#[test]
fn infinite_constants_for_dependent_systems() {
    let dup = duplicated(2, true).unwrap();
    let m = basis_metrics(&dup);
    assert_eq!(m.riesz, ExtReal::Infinite);
    assert_eq!(m.schauder, ExtReal::Infinite);
    assert_eq!(m.separation, 0.0);
}
