//! Sample-size bounds for multi-rank and tubal-rank recovery.

use ttsvd::lab::{bound_samples, recovery_bound, BoundSpec};

fn main() {
    println!("{:>5} {:>12} {:>14}", "n", "multi-rank", "tubal");
    for n in [50, 100, 200, 400] {
        let multi = bound_samples(&BoundSpec::multirank(1.0, 200, n).unwrap());
        let tubal = bound_samples(&BoundSpec::tubal(1.0, 10, n).unwrap());
        println!("{n:>5} {multi:>12} {tubal:>14}");
    }
    println!("general bound for 100x80x20, mu 1.5, Σr 60: {:.0}", recovery_bound(1.0, 1.5, 60, (100, 80, 20)));
}
