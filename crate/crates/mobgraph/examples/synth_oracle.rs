//! Differential self-test: exhaustively compare the classifier with the
//! brute-force oracle over every small yearly-set sequence.
//!
//! Run with: cargo run --example synth_oracle

use std::collections::BTreeMap;

use mobgraph::synth::{enumerate_small_timelines, oracle_classify};
use mobgraph::taxonomy::{classify, MobilityType};
use mobgraph::timeline::AffiliationTimeline;

fn main() -> anyhow::Result<()> {
    let mut by_type: BTreeMap<MobilityType, u64> = BTreeMap::new();
    let mut total = 0u64;
    for len in 1..=4 {
        for seq in enumerate_small_timelines(3, len) {
            let observed = seq
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, s)| (2008 + i as i32, s))
                .collect();
            let t = AffiliationTimeline::from_observed("x", observed)?;
            let got = classify(&t);
            let expected = oracle_classify(&seq);
            anyhow::ensure!(got == expected, "divergence on {seq:?}: {got:?} vs {expected:?}");
            *by_type.entry(got).or_insert(0) += 1;
            total += 1;
        }
    }
    println!("{total} sequences agree with the oracle:");
    for (ty, n) in by_type {
        println!("  {ty:?}: {n}");
    }
    Ok(())
}
