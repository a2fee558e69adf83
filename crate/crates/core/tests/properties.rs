mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rnsnet::hw;
use rnsnet::inference::{count_macs, infer_int, infer_rns, FullyConnected, LayerSpec, NetworkSpec, Output};
use rnsnet::ModuliSet;

/// A moduli set together with two values in its range.
fn set_and_pair() -> impl Strategy<Value = (ModuliSet, u64, u64)> {
    (2u32..=15).prop_flat_map(|n| {
        let ms = ModuliSet::new(n).unwrap();
        let m = ms.range();
        (Just(ms), 0..m, 0..m)
    })
}

fn set_and_signed(len: usize) -> impl Strategy<Value = (ModuliSet, Vec<i64>)> {
    (2u32..=15).prop_flat_map(move |n| {
        let ms = ModuliSet::new(n).unwrap();
        let p = ms.pos_max() as i64;
        (Just(ms), prop::collection::vec(-p..=p, 1..=len))
    })
}

proptest! {
    #[test]
    fn ring_homomorphism((ms, a, b) in set_and_pair()) {
        let m = u128::from(ms.range());
        let (ra, rb) = (ms.encode(a).unwrap(), ms.encode(b).unwrap());
        prop_assert_eq!(ms.decode(&ms.add(&ra, &rb)).unwrap(), ((u128::from(a) + u128::from(b)) % m) as u64);
        prop_assert_eq!(ms.decode(&ms.sub(&ra, &rb)).unwrap(), ((u128::from(a) + m - u128::from(b)) % m) as u64);
        prop_assert_eq!(ms.decode(&ms.mul(&ra, &rb)).unwrap(), (u128::from(a) * u128::from(b) % m) as u64);
        prop_assert_eq!(ms.add(&ra, &ms.neg(&ra)), ms.encode(0).unwrap());
    }

    #[test]
    fn compare_and_parity_agree_with_integers((ms, a, b) in set_and_pair()) {
        let (ra, rb) = (ms.encode(a).unwrap(), ms.encode(b).unwrap());
        prop_assert_eq!(ms.parity(&ra), a % 2 == 1);
        prop_assert_eq!(ms.compare_ge(&ra, &rb), a >= b);
    }

    #[test]
    fn bit_level_matches_word_level((ms, a, b) in set_and_pair()) {
        let (ra, rb) = (ms.encode(a).unwrap(), ms.encode(b).unwrap());
        prop_assert_eq!(hw::forward_convert(a, &ms), ra);
        prop_assert_eq!(hw::rns_add(&ra, &rb, &ms), ms.add(&ra, &rb));
        prop_assert_eq!(hw::rns_mul(&ra, &rb, &ms), ms.mul(&ra, &rb));
        prop_assert_eq!(hw::parity_circuit_rns(&ra, &ms), ms.parity(&ra));
    }

    #[test]
    fn signed_round_trip_and_relu((ms, v) in set_and_signed(1)) {
        let x = ms.encode_signed(v[0]).unwrap();
        prop_assert_eq!(ms.decode_signed(&x).unwrap(), v[0]);
        prop_assert_eq!(ms.decode_signed(&ms.relu(&x)).unwrap(), v[0].max(0));
    }

    #[test]
    fn argmax_is_shift_invariant((ms, v) in set_and_signed(12), shift in -1000i64..=1000) {
        let p = ms.pos_max() as i64;
        prop_assume!(v.iter().all(|x| (x + shift).abs() <= p));
        let enc = |xs: &[i64]| xs.iter().map(|&x| ms.encode_signed(x).unwrap()).collect::<Vec<_>>();
        let shifted: Vec<i64> = v.iter().map(|x| x + shift).collect();
        prop_assert_eq!(ms.argmax(&enc(&v)).unwrap(), ms.argmax(&enc(&shifted)).unwrap());
    }

    #[test]
    fn relu_before_argmax_keeps_the_winner((ms, v) in set_and_signed(12)) {
        prop_assume!(v.iter().any(|&x| x > 0));
        let enc: Vec<_> = v.iter().map(|&x| ms.encode_signed(x).unwrap()).collect();
        let rectified: Vec<_> = enc.iter().map(|x| ms.relu(x)).collect();
        prop_assert_eq!(ms.argmax(&enc).unwrap(), ms.argmax(&rectified).unwrap());
    }

    #[test]
    fn mac_count_is_additive(dims in prop::collection::vec(1usize..=64, 2..=6), cut in 1usize..=5) {
        let fc = |i: usize| LayerSpec::FullyConnected(FullyConnected {
            out_features: dims[i + 1],
            in_features: dims[i],
            weights: None,
            bias: None,
        });
        let cut = cut.min(dims.len() - 1);
        let layers: Vec<_> = (0..dims.len() - 1).map(fc).collect();
        let net = |range: std::ops::Range<usize>| {
            NetworkSpec::new(7, 6, 6, vec![dims[range.start]], layers[range].to_vec()).unwrap()
        };
        let whole = count_macs(&net(0..layers.len())).unwrap();
        let head = if cut > 0 { count_macs(&net(0..cut)).unwrap() } else { 0 };
        let tail = if cut < layers.len() { count_macs(&net(cut..layers.len())).unwrap() } else { 0 };
        prop_assert_eq!(whole, head + tail);
        let direct: usize = dims.windows(2).map(|w| w[0] * w[1]).sum();
        prop_assert_eq!(whole, direct as u64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residue_inference_equals_integer_inference(seed in any::<u64>(), n in 6u32..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = common::random_network(&mut rng, n, 5);
        let ms = net.moduli().unwrap();
        for _ in 0..4 {
            let x = common::random_input(&mut rng, &net);
            let want = infer_int(&net, &x).unwrap();
            prop_assert_eq!(infer_rns(&net, &x, &ms).unwrap(), want.clone());
            match want {
                Output::Class(c) => {
                    prop_assert!(net.output_shape().unwrap().is_empty());
                    let shapes = net.layer_shapes().unwrap();
                    let logits: usize = shapes[shapes.len() - 2].iter().product();
                    prop_assert!(c < logits);
                }
                Output::Tensor(t) => prop_assert_eq!(t.shape().to_vec(), net.output_shape().unwrap()),
            }
        }
    }

    #[test]
    fn network_files_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = common::random_network(&mut rng, 7, 6);
        prop_assert_eq!(NetworkSpec::from_json(&net.to_json()).unwrap(), net);
    }
}
