//! Shared workloads for the criterion benches.

use delchan::BitString;

/// Patterns exercised by every kernel bench: constant, alternating, and a
/// mixed word of the same length.
pub fn patterns(m: usize) -> Vec<BitString> {
    let mixed: Vec<u8> = (0..m).map(|i| ((i * 7 + 3) % 5 < 2) as u8).collect();
    vec![
        BitString::zeros(m),
        BitString::alternating(m, 0),
        BitString::from_bits(mixed).expect("0/1 symbols"),
    ]
}
