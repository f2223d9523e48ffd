use boolcirc::circuit::apply_gate_counted;
use boolcirc::{BitVec, FeaturePair, TruthTable, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bound(k: usize, n: usize, m: usize) -> u64 {
    ((1u64 << k) + (1u64 << (k - 1)) + 1) * n.div_ceil(m) as u64
}

fn check<W: Word>(k: usize, n: usize, slack: u64, rng: &mut ChaCha8Rng) {
    let inputs: Vec<FeaturePair<W>> = (0..k)
        .map(|_| {
            let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            FeaturePair::from_positive(BitVec::from_bools(&bits))
        })
        .collect();
    let refs: Vec<&FeaturePair<W>> = inputs.iter().collect();
    let mut tables: Vec<TruthTable> = (0..30)
        .map(|_| {
            let density = rng.random_range(0.0..=1.0);
            let bits: Vec<bool> = (0..1 << k).map(|_| rng.random_bool(density)).collect();
            TruthTable::from_bits(&bits).unwrap()
        })
        .collect();
    tables.push(TruthTable::new(k).unwrap());
    tables.push(TruthTable::new(k).unwrap().complement());
    tables.push(TruthTable::from_fn(k, |p| p.count_ones() % 2 == 1).unwrap());
    tables.push(TruthTable::from_fn(k, |p| p == (1 << k) - 1).unwrap());
    let limit = bound(k, n, W::BITS) + slack;
    for table in &tables {
        let (_, ops) = apply_gate_counted(table, &refs).unwrap();
        assert!(
            ops <= limit,
            "k={k} n={n} m={} table={table:?}: {ops} ops > {limit}",
            W::BITS
        );
    }
}

#[test]
fn gate_word_operations_within_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in [2, 4, 6] {
        for n in [64, 64000] {
            check::<u32>(k, n, 0, &mut rng);
            check::<u64>(k, n, 0, &mut rng);
        }
    }
}

/// A partial last word costs at most two extra masking operations, one for
/// each half of the output pair.
#[test]
fn odd_lengths_stay_within_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 1..=8 {
        for n in [1, 63, 65, 1000] {
            check::<u64>(k, n, 2, &mut rng);
        }
    }
}
