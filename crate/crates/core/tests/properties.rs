use entspread_core::spectra::{
    entanglement_moments, renyi_entropy, smoothed_spread, spread, tensor_power, tensor_product, Order,
};
use entspread_core::states::{embezzle_fidelity, local_conversion_fidelity};
use entspread_core::SchmidtSpectrum;
use proptest::prelude::*;

fn random_spectrum(max_dim: usize) -> impl Strategy<Value = SchmidtSpectrum> {
    prop::collection::vec(0.01f64..1.0, 1..=max_dim).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        let mut values: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let fix = 1.0 - values.iter().sum::<f64>();
        values[0] += fix;
        SchmidtSpectrum::from_values(&values).unwrap()
    })
}

proptest! {
    #[test]
    fn renyi_entropy_is_non_increasing_in_order(s in random_spectrum(8)) {
        let orders = [0.0, 0.5, 1.0, 2.0, 5.0];
        let mut last = f64::INFINITY;
        for a in orders {
            let h = renyi_entropy(&s, a).unwrap();
            prop_assert!(h <= last + 1e-10);
            last = h;
        }
        prop_assert!(renyi_entropy(&s, Order::Infinity).unwrap() <= last + 1e-10);
    }

    #[test]
    fn entropy_and_variance_add_under_tensor(a in random_spectrum(6), b in random_spectrum(6)) {
        let (ea, va) = entanglement_moments(&a);
        let (eb, vb) = entanglement_moments(&b);
        let (e, v) = entanglement_moments(&tensor_product(&a, &b));
        prop_assert!((e - ea - eb).abs() < 1e-10);
        prop_assert!((v * v - va * va - vb * vb).abs() < 1e-9);
    }

    #[test]
    fn tensor_power_agrees_with_repeated_products(s in random_spectrum(4), n in 1u32..5) {
        let mut acc = s.clone();
        for _ in 1..n {
            acc = tensor_product(&acc, &s);
        }
        let p = tensor_power(&s, n).unwrap();
        prop_assert!((spread(&p) - spread(&acc)).abs() < 1e-10);
        prop_assert!((entanglement_moments(&p).0 - entanglement_moments(&acc).0).abs() < 1e-10);
        prop_assert_eq!(p.rank(), acc.rank());
    }

    #[test]
    fn smoothed_spread_never_exceeds_spread(s in random_spectrum(10), eps in 0.0f64..0.9) {
        prop_assert!(smoothed_spread(&s, eps).unwrap() <= spread(&s) + 1e-12);
    }

    #[test]
    fn local_fidelity_is_a_fidelity(a in random_spectrum(6), b in random_spectrum(6)) {
        let f = local_conversion_fidelity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - local_conversion_fidelity(&b, &a)).abs() < 1e-12);
        prop_assert!((local_conversion_fidelity(&a, &a) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn embezzling_improves_with_size() {
    let target = SchmidtSpectrum::flat_power_of_two(1);
    let fs: Vec<f64> = (2..=12).map(|n| embezzle_fidelity(n, &target).unwrap()).collect();
    assert!(fs.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!(fs[fs.len() - 1] > 0.9);
}
