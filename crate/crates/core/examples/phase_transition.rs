//! A small recovery phase-transition sweep, written as CSV to stdout.

use ttsvd::io::encode_results;
use ttsvd::lab::{aggregate, run_phase_experiment, PhaseConfig};
use ttsvd::TransformKind;

fn main() {
    let cfg = PhaseConfig {
        n_list: vec![12, 16],
        sum_rank: 12,
        tubal: 2,
        transforms: vec![TransformKind::Fft, TransformKind::Dct],
        const_list: vec![0.25, 1.0, 2.0],
        trials: 2,
        seed: 11,
        ..Default::default()
    };
    let records = run_phase_experiment(&cfg).unwrap();
    encode_results(&records, &mut std::io::stdout()).unwrap();

    eprintln!("n  transform  const  recovered");
    for p in aggregate(&records) {
        eprintln!("{:<2} {:<10} {:<6} {}/{}", p.n, p.transform, p.constant, p.successes, p.trials);
    }
}
