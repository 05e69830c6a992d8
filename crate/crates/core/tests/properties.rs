use proptest::prelude::*;

use hardy_means_core::axioms::{check_reduction, extend_lifted, lift_to_weighted};
use hardy_means_core::hardy::{
    adversarial_lower_bound, closed_form_c, est_lambda, hardy_partial_ratio, EstimateOptions, WeightFamily,
};
use hardy_means_core::kedlaya::{is_in_v, kedlaya_gap, KedlayaInstance};
use hardy_means_core::sampling::{trial_rng, v_weights};
use hardy_means_core::step::{
    check_mass_balance, integral_mean, mu1_discretization_chain, nonincreasing_rearrangement, rearrange_pair,
    step_from_weighted, ChainOptions,
};
use hardy_means_core::{eval_mean, EntryVector, MeanSpec, Numeric, Rational, WeightVector};

fn any_spec() -> impl Strategy<Value = MeanSpec> {
    prop::sample::select(vec![
        "min",
        "max",
        "arithmetic",
        "geometric",
        "power:-3",
        "power:-1",
        "power:-1/2",
        "power:1/1000",
        "power:1/2",
        "power:2",
        "power:3",
        "qa:log",
        "qa:exp",
        "qa:pow:3",
        "qa:pow:-2",
    ])
    .prop_map(|s| s.parse().unwrap())
}

fn entries(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 1..=max_len).prop_map(|v| v.into_iter().map(|e| 10f64.powf(e)).collect())
}

/// Entries with positive weights of the same length.
fn weighted(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    entries(max_len).prop_flat_map(|x| {
        let n = x.len();
        (Just(x), prop::collection::vec(1e-3f64..10.0, n))
    })
}

fn small_rationals(len: usize, max_num: i64, max_den: i64) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((1..=max_num, 1..=max_den), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Rational::new(a, b)).collect())
}

fn exact_weighted(max_len: usize) -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    (1..=max_len).prop_flat_map(|n| (small_rationals(n, 6, 2), small_rationals(n, 8, 4)))
}

fn ev(x: &[f64]) -> EntryVector {
    EntryVector::from_f64(x).unwrap()
}

fn wv(w: &[f64]) -> WeightVector {
    WeightVector::from_f64(w).unwrap()
}

fn exact_ev(x: &[Rational]) -> EntryVector {
    EntryVector::new(x.iter().cloned().map(Numeric::Exact).collect()).unwrap()
}

fn exact_wv(w: &[Rational]) -> WeightVector {
    WeightVector::new(w.iter().cloned().map(Numeric::Exact).collect()).unwrap()
}

fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mean_value_property(spec in any_spec(), (x, w) in weighted(12)) {
        let m = eval_mean(&spec, &ev(&x), &wv(&w)).unwrap().to_f64();
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= m && m <= hi);
    }

    #[test]
    fn weight_scaling_invariance(spec in any_spec(), (x, w) in weighted(12), t in 1e-3f64..1e3) {
        let a = eval_mean(&spec, &ev(&x), &wv(&w)).unwrap().to_f64();
        let scaled: Vec<f64> = w.iter().map(|v| v * t).collect();
        let b = eval_mean(&spec, &ev(&x), &wv(&scaled)).unwrap().to_f64();
        prop_assert!(close(a, b, 1e-9), "{a} vs {b}");
    }

    #[test]
    fn weight_scaling_is_exact_for_rational_means(
        spec in prop::sample::select(vec![MeanSpec::arithmetic(), MeanSpec::min(), MeanSpec::max()]),
        (x, w) in exact_weighted(10),
        t in (1i64..50, 1i64..50),
    ) {
        let t = Numeric::ratio(t.0, t.1);
        let a = eval_mean(&spec, &exact_ev(&x), &exact_wv(&w)).unwrap();
        let b = eval_mean(&spec, &exact_ev(&x), &exact_wv(&w).scale(&t).unwrap()).unwrap();
        prop_assert!(a.is_exact());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reduction_in_float_mode(spec in any_spec(), (x, w) in weighted(8), seed in any::<u64>()) {
        let n = x.len();
        let mu: Vec<f64> = (0..n).map(|i| 0.1 + ((seed >> (i % 60)) & 7) as f64).collect();
        prop_assert!(check_reduction(&spec, &ev(&x), &wv(&w), &wv(&mu)).unwrap().passed);
    }

    #[test]
    fn permutation_symmetry(spec in any_spec(), (x, w) in weighted(10), rot in 0usize..10) {
        let n = x.len();
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + rot) % n).collect();
        let mut seen = vec![false; n];
        let perm: Vec<usize> = perm.into_iter().filter(|&i| !std::mem::replace(&mut seen[i], true)).collect();
        let perm: Vec<usize> = perm.into_iter().chain((0..n).filter(|i| !seen[*i])).collect();
        let px: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
        let pw: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
        let a = eval_mean(&spec, &ev(&x), &wv(&w)).unwrap().to_f64();
        let b = eval_mean(&spec, &ev(&px), &wv(&pw)).unwrap().to_f64();
        prop_assert!(close(a, b, 1e-12), "{a} vs {b}");
    }

    #[test]
    fn monotone_in_each_entry(spec in any_spec(), (x, w) in weighted(10), i in any::<prop::sample::Index>(), bump in 0.0f64..2.0) {
        let i = i.index(x.len());
        let mut y = x.clone();
        y[i] *= 1.0 + bump;
        let a = eval_mean(&spec, &ev(&x), &wv(&w)).unwrap().to_f64();
        let b = eval_mean(&spec, &ev(&y), &wv(&w)).unwrap().to_f64();
        prop_assert!(b >= a * (1.0 - 1e-12), "{a} then {b}");
    }

    #[test]
    fn power_means_are_ordered((x, w) in weighted(10), p in -5.0f64..5.0, dq in 0.01f64..3.0) {
        let a = eval_mean(&MeanSpec::Power(p), &ev(&x), &wv(&w)).unwrap().to_f64();
        let b = eval_mean(&MeanSpec::Power(p + dq), &ev(&x), &wv(&w)).unwrap().to_f64();
        prop_assert!(a <= b * (1.0 + 1e-12), "M_{p} = {a} > M_{} = {b}", p + dq);
    }

    #[test]
    fn lift_with_unit_weights_is_the_base_mean(x in small_rationals(8, 9, 3)) {
        let spec = MeanSpec::arithmetic();
        let x = exact_ev(&x);
        let lifted = lift_to_weighted(&spec, &x, &WeightVector::ones(x.len())).unwrap();
        prop_assert_eq!(lifted, eval_mean(&spec, &x, &WeightVector::ones(x.len())).unwrap());
    }

    #[test]
    fn lifted_extension_matches_rational_weights((x, w) in exact_weighted(6)) {
        let spec = MeanSpec::arithmetic();
        let (x, w) = (exact_ev(&x), exact_wv(&w));
        prop_assert_eq!(extend_lifted(&spec, &x, &w).unwrap(), eval_mean(&spec, &x, &w).unwrap());
    }

    #[test]
    fn kedlaya_constant_entries(spec in any_spec(), w in prop::collection::vec(1e-3f64..10.0, 1..10), c in 1e-2f64..1e2) {
        let inst = KedlayaInstance::new(spec, ev(&vec![c; w.len()]), wv(&w)).unwrap();
        prop_assert_eq!(kedlaya_gap(&inst).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn kedlaya_single_entry(spec in any_spec(), x in 1e-3f64..1e3, w in 1e-3f64..10.0) {
        let inst = KedlayaInstance::new(spec, ev(&[x]), wv(&[w])).unwrap();
        prop_assert_eq!(kedlaya_gap(&inst).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn kedlaya_arithmetic_gap_is_zero((x, w) in exact_weighted(10)) {
        let inst = KedlayaInstance::new(MeanSpec::arithmetic(), exact_ev(&x), exact_wv(&w)).unwrap();
        let gap = kedlaya_gap(&inst).unwrap();
        prop_assert!(gap.is_exact() && gap.is_zero());
    }

    #[test]
    fn kedlaya_gap_is_homogeneous(p in -4.0f64..4.0, (x, w) in weighted(8), c in 1e-2f64..1e2) {
        let spec = MeanSpec::Power(p);
        let g = kedlaya_gap(&KedlayaInstance::new(spec, ev(&x), wv(&w)).unwrap()).unwrap().to_f64();
        let cx: Vec<f64> = x.iter().map(|v| v * c).collect();
        let gc = kedlaya_gap(&KedlayaInstance::new(spec, ev(&cx), wv(&w)).unwrap()).unwrap().to_f64();
        let scale = x.iter().copied().fold(0.0, f64::max) * c;
        prop_assert!((gc - c * g).abs() <= 1e-9 * scale, "{gc} vs {}", c * g);
    }

    #[test]
    fn v_sampler_output_is_in_v(seed in any::<u64>(), n in 1usize..20) {
        let w: Vec<Numeric> = v_weights(&mut trial_rng(seed, 0), n).into_iter().map(Numeric::Exact).collect();
        prop_assert!(is_in_v(&w).unwrap().is_member);
    }

    #[test]
    fn unit_weight_ratios_stay_below_the_constant(p in prop::sample::select(vec![-3.0, -1.0, 0.0, 0.25, 0.5, 0.9]), x in entries(200)) {
        let trace = hardy_partial_ratio(&MeanSpec::Power(p), &ev(&x), &WeightVector::ones(x.len())).unwrap();
        prop_assert!(trace.max_ratio() < closed_form_c(p));
    }

    #[test]
    fn rearrangement_preserves_distribution((x, w) in exact_weighted(10)) {
        let f = step_from_weighted(&exact_ev(&x), &exact_wv(&w)).unwrap();
        let g = nonincreasing_rearrangement(&f);
        prop_assert_eq!(g.length(), f.length());
        prop_assert!(g.is_nonincreasing());
        prop_assert_eq!(nonincreasing_rearrangement(&g), g.clone());
        let mass = |h: &hardy_means_core::step::StepFunction, t: &Numeric| -> Rational {
            h.values().iter().zip(h.lengths()).filter(|(v, _)| *v == t).map(|(_, l)| l).sum()
        };
        for t in f.values() {
            prop_assert_eq!(mass(&f, t), mass(&g, t));
        }
    }

    #[test]
    fn integral_mean_bridges_to_eval_mean(spec in any_spec(), (x, w) in exact_weighted(8)) {
        let (x, w) = (exact_ev(&x), exact_wv(&w));
        let f = step_from_weighted(&x, &w).unwrap();
        let a = integral_mean(&spec, &f, &Rational::zero(), f.length()).unwrap();
        prop_assert_eq!(a, eval_mean(&spec, &x, &w).unwrap());
    }

    #[test]
    fn rearrange_pair_balances_mass((x, w) in exact_weighted(10)) {
        let (x, w) = (exact_ev(&x), exact_wv(&w));
        let r = rearrange_pair(&x, &w).unwrap();
        prop_assert!(check_mass_balance(&x, &w, &r).passed);
        prop_assert_eq!(r.index_map.len(), x.len() + 1);
        prop_assert_eq!(*r.index_map.last().unwrap(), r.y.len());
        prop_assert!(r.psi_partial.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn chain_majorant_decreases_on_doubling((x, w) in exact_weighted(8), p in prop::sample::select(vec![-1.0, 0.0, 0.5])) {
        let mut x = x;
        x.sort_by(|a, b| b.cmp(a));
        let (x, w) = (exact_ev(&x), exact_wv(&w));
        let spec = MeanSpec::Power(p);
        let hc = closed_form_c(p);
        let mut prev = f64::INFINITY;
        for j in [4, 8, 16, 32, 64, 128] {
            let r = mu1_discretization_chain(&spec, &x, &w, &ChainOptions::new(j, hc)).unwrap();
            prop_assert!(r.all_passed);
            prop_assert!(r.majorant < prev);
            prev = r.majorant;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn adversarial_bound_stays_below_estimate(p in prop::sample::select(vec![-1.0, 0.0, 0.5, 1.0]), n in 100usize..400, seed in any::<u64>()) {
        let spec = MeanSpec::Power(p);
        let lower = adversarial_lower_bound(&spec, &WeightVector::ones(n), None, 30, seed).unwrap();
        let upper = est_lambda(&spec, &WeightFamily::ones(), &EstimateOptions::with_n_max(n)).unwrap();
        prop_assert!(lower.best_ratio <= upper.value + 1e-6, "{} > {}", lower.best_ratio, upper.value);
    }
}
