use super::ExponentVec;

/// `C(n, k)` as a `u128`; saturates rather than overflowing.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All exponent vectors of total degree at most `d` in `n` variables, in
/// graded-lex order. The constant monomial comes first.
pub fn monomial_basis(n: usize, d: u32) -> Vec<ExponentVec> {
    let mut out = Vec::with_capacity(binomial(n as u64 + d as u64, n as u64) as usize);
    let mut buf = vec![0u32; n];
    for deg in 0..=d {
        fill(&mut buf, 0, deg, &mut out);
    }
    out
}

// Emits every vector with the given remaining degree, larger leading
// exponents first, which is exactly graded-lex order within one degree.
fn fill(buf: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<ExponentVec>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(ExponentVec::new(buf.to_vec()));
        return;
    }
    if buf.is_empty() {
        out.push(ExponentVec::new(Vec::new()));
        return;
    }
    for e in (0..=remaining).rev() {
        buf[pos] = e;
        fill(buf, pos + 1, remaining - e, out);
    }
    buf[pos] = 0;
}
