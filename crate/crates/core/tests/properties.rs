mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sketch_concepts::eval::fscore;
use sketch_concepts::induction::canonical::canonical_key;
use sketch_concepts::sketch::{ParamKind, QuantizationSpec};
use sketch_concepts::synth;

use common::{isomorphic, permuted, random_concept};

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn key_survives_relabeling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_concept(&mut rng, 4, 5);
        let p = permuted(&t, &mut rng);
        prop_assert_eq!(canonical_key(&t), canonical_key(&p));
    }

    #[test]
    fn equal_keys_are_isomorphic(a in any::<u64>(), b in any::<u64>()) {
        let s = random_concept(&mut ChaCha8Rng::seed_from_u64(a), 2, 3);
        let t = random_concept(&mut ChaCha8Rng::seed_from_u64(b), 2, 3);
        prop_assert_eq!(canonical_key(&s) == canonical_key(&t), isomorphic(&s, &t));
    }

    #[test]
    fn quantize_inverts_bin_centers(bin in 0u16..80) {
        let q = QuantizationSpec::default();
        for kind in [ParamKind::Coord, ParamKind::Length, ParamKind::Angle] {
            let b = bin % q.bins(kind);
            prop_assert_eq!(q.quantize(kind, q.dequantize(kind, b)), b);
        }
    }
}

#[test]
fn far_coordinate_breaks_one_primitive() {
    let q = QuantizationSpec::default();
    let s = synth::rectangle_sketch();
    assert_eq!(fscore(&s, &s, &q).primitive_f, 1.0);
    for p in 0..s.primitives.len() {
        for i in 0..s.primitives[p].params.len() {
            let mut moved = s.clone();
            let bins = q.bins(moved.primitives[p].kind.schema()[i]);
            let b = &mut moved.primitives[p].params[i];
            *b = if *b + 9 < bins { *b + 9 } else { *b - 9 };
            let f = fscore(&moved, &s, &q);
            assert!(!f.primitive_correct[p], "primitive {p} param {i}");
            assert_eq!(f.primitive_correct.iter().filter(|&&c| !c).count(), 1);
        }
    }
}
