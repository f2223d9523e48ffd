mod common;

use boolcirc::circuit::{deserialize, export_netlist, predict, read_model, serialize, write_model};
use boolcirc::{CircuitTree, Error, TruthTable};
use boolcirc_oracle::Netlist;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn serialization_round_trip(seed in any::<u64>()) {
        let case = common::random_case(seed, 6, 3, 64);
        let bytes = serialize(&case.tree);
        prop_assert_eq!(&deserialize(&bytes).unwrap(), &case.tree);
        prop_assert_eq!(serialize(&deserialize(&bytes).unwrap()), bytes);
    }

    #[test]
    fn netlist_matches_tree(seed in any::<u64>()) {
        let case = common::random_case(seed, 4, 3, 200);
        let netlist = Netlist::parse(&export_netlist(&case.tree)).unwrap();
        let packed = predict(&case.tree, &case.dataset::<u64>()).unwrap().to_bools();
        let interpreted: Vec<bool> = case.rows.iter().map(|x| netlist.eval(x)).collect();
        prop_assert_eq!(interpreted, packed);
    }

    #[test]
    fn any_single_byte_corruption_is_detected(seed in any::<u64>(), pos in any::<prop::sample::Index>(), flip in 1u8..=255) {
        let case = common::random_case(seed, 4, 2, 8);
        let mut bytes = serialize(&case.tree);
        let i = pos.index(bytes.len());
        bytes[i] ^= flip;
        prop_assert!(deserialize(&bytes).is_err());
    }
}

fn and_tree() -> CircuitTree {
    let and = TruthTable::from_bits(&[false, false, false, true]).unwrap();
    CircuitTree::new(2, 1, 3, vec![0, 2], vec![and]).unwrap()
}

#[test]
fn golden_model_file() {
    let golden = include_bytes!("fixtures/and_tree.bgc1");
    assert_eq!(serialize(&and_tree()), golden);
    assert_eq!(deserialize(golden).unwrap(), and_tree());
}

#[test]
fn golden_netlist() {
    assert_eq!(
        export_netlist(&and_tree()).lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(),
        ["lut n0 0x8 x0 x2", "output n0"]
    );
}

#[test]
fn file_round_trip_and_errors() {
    let dir = std::env::temp_dir().join(format!("boolcirc-model-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.bgc1");
    write_model(&and_tree(), &path).unwrap();
    assert_eq!(read_model(&path).unwrap(), and_tree());
    let bytes = std::fs::read(&path).unwrap();
    assert!(matches!(deserialize(&bytes[..bytes.len() - 1]), Err(Error::Format { .. })));
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(matches!(deserialize(&extra), Err(Error::Format { .. })));
    assert!(matches!(deserialize(b"BGC2"), Err(Error::Format { offset: 0, .. })));
    std::fs::remove_dir_all(dir).unwrap();
}
