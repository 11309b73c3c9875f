//! Lexicographic enumeration of fixed-length tuples.

use std::ops::ControlFlow;

/// Visits every tuple of `len` digits in `0..base`, lexicographically.
///
/// Stops early when `visit` breaks and returns the break value.
pub fn for_each_tuple<B>(base: usize, len: usize, mut visit: impl FnMut(&[usize]) -> ControlFlow<B>) -> Option<B> {
    for_each_mixed(&vec![base; len], &mut visit)
}

/// Like [`for_each_tuple`] with a separate radix per position.
pub fn for_each_mixed<B>(bases: &[usize], mut visit: impl FnMut(&[usize]) -> ControlFlow<B>) -> Option<B> {
    if bases.contains(&0) {
        return None;
    }
    let mut digits = vec![0usize; bases.len()];
    loop {
        if let ControlFlow::Break(b) = visit(&digits) {
            return Some(b);
        }
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < bases[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Returns the first tuple (in lexicographic order) on which `pred` fails.
pub fn first_violation(bases: &[usize], mut pred: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    for_each_mixed(bases, |t| if pred(t) { ControlFlow::Continue(()) } else { ControlFlow::Break(t.to_vec()) })
}

/// Mixed-radix index of `digits` in base `base` (most significant first).
#[inline]
pub fn encode(base: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * base + d)
}

/// Inverse of [`encode`] for a fixed length.
pub fn decode(base: usize, mut index: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let mut seen = Vec::new();
        for_each_tuple::<()>(2, 2, |t| {
            seen.push(t.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn empty_tuple_visited_once() {
        let mut count = 0;
        for_each_tuple::<()>(5, 0, |_| {
            count += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn encode_roundtrip() {
        let mut out = [0; 3];
        for i in 0..27 {
            decode(3, i, &mut out);
            assert_eq!(encode(3, &out), i);
        }
    }

    #[test]
    fn first_violation_is_least() {
        let v = first_violation(&[3, 3], |t| t[0] + t[1] < 3);
        assert_eq!(v, Some(vec![1, 2]));
    }
}
