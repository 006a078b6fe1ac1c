use quadfop::fop::{run_fop, run_fop_range, DedupKey, PolyFamily};
use quadfop::Sign;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let run = run_fop(&PolyFamily::compact_units(Sign::Pos), 1_000_000, DedupKey::Radical).unwrap();
    println!("radicals B=1e6: N={} in {:?}", run.stats.distinct, t0.elapsed());
    let first: Vec<(i128, u64)> = run.records.iter().filter(|r| !r.is_degenerate()).take(10).map(|r| (r.radical, r.r)).collect();
    println!("  prefix: {first:?}");

    let t0 = Instant::now();
    let fams = [PolyFamily::compact_units(Sign::Pos), PolyFamily::compact_units(Sign::Neg)];
    let run = quadfop::fop::run_fop_multi(&fams, 1_000_000, DedupKey::Discriminant).unwrap();
    println!("discriminants B=1e6: N={} in {:?}", run.stats.distinct, t0.elapsed());
    let first: Vec<i128> = run.records.iter().map(|r| r.key).take(9).collect();
    println!("  prefix: {first:?}");

    let t0 = Instant::now();
    let run = run_fop_range(&[PolyFamily::units(Sign::Neg)], 1, 10_000_000, DedupKey::Radical).unwrap();
    println!("units s=-1 B=1e7: N={} in {:?}", run.stats.distinct, t0.elapsed());

    let t0 = Instant::now();
    let run = run_fop_range(&[PolyFamily::units(Sign::Pos)], 3, 10_000_000, DedupKey::Radical).unwrap();
    println!("units s=+1 B=1e7: N={} in {:?}", run.stats.distinct, t0.elapsed());
}
