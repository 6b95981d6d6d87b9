//! Checks that are reported rather than asserted.

use nmland::analysis::{enumerate, local_peaks, DEFAULT_BUDGET};
use nmland::model::{build_type1, Alphabet, Arity, BuildOptions};

/// Whether a ternary alphabet on [-1, 1] resamples the binary landscape at a
/// finer resolution: how many binary peaks are still peaks at the matching
/// ternary corner.
#[test]
fn arity_refinement_keeps_binary_peaks() {
    let ternary = Alphabet::new(1.0, 1.0, Arity::Levels(3)).unwrap();
    for n in [4, 6, 8] {
        let (mut kept, mut total) = (0, 0);
        for seed in 0..20 {
            let binary = build_type1(n, 3, 10.0, seed, &BuildOptions::default()).unwrap();
            let fine = binary.with_alphabet(ternary).unwrap();
            let eb = enumerate(&binary, DEFAULT_BUDGET).unwrap();
            let et = enumerate(&fine, DEFAULT_BUDGET).unwrap();
            let fine_peaks = local_peaks(&et);
            for p in local_peaks(&eb) {
                let digits: Vec<usize> = eb.digits(p).iter().map(|&d| 2 * d).collect();
                total += 1;
                kept += usize::from(fine_peaks.contains(&et.index_of(&digits)));
            }
        }
        println!("n={n}: {kept}/{total} binary peaks are ternary peaks");
        assert!(kept <= total);
    }
}
