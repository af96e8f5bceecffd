use super::IndexMap;
use num_integer::Integer;

/// Parameters `t ≥ 0` with `a(t)` in the image of `b`.
///
/// Solves `a.stride·t + a.offset = b.stride·u + b.offset` over the naturals.
/// The solution set is empty or an arithmetic progression in `t`, returned as
/// an [`IndexMap`] over a fresh parameter.
pub fn progression_meet(a: IndexMap, b: IndexMap) -> Option<IndexMap> {
    let (s1, o1) = (a.stride() as i128, a.offset() as i128);
    let (s2, o2) = (b.stride() as i128, b.offset() as i128);
    let diff = o2 - o1;
    let ext = s1.extended_gcd(&s2);
    let g = ext.gcd;
    if diff.mod_floor(&g) != 0 {
        return None;
    }
    let modulus = s2 / g;
    // s1·x ≡ g (mod s2), so t ≡ x·diff/g (mod s2/g).
    let t0 = (ext.x * (diff / g)).mod_floor(&modulus);
    // a(t) ≥ o2 is needed for u ≥ 0.
    let lower = if diff > 0 { Integer::div_ceil(&diff, &s1) } else { 0 };
    let t = if t0 >= lower {
        t0
    } else {
        t0 + Integer::div_ceil(&(lower - t0), &modulus) * modulus
    };
    Some(IndexMap::new(modulus as u64, t as u64).expect("positive modulus"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(a: IndexMap, b: IndexMap, bound: u64) -> Vec<u64> {
        (0..=bound)
            .filter(|&t| b.preimage(a.apply(t)).is_some())
            .collect()
    }

    #[test]
    fn matches_brute_force_index_match() {
        for s1 in 1..7 {
            for o1 in 0..9 {
                for s2 in 1..7 {
                    for o2 in 0..9 {
                        let a = IndexMap::new(s1, o1).unwrap();
                        let b = IndexMap::new(s2, o2).unwrap();
                        let expected = brute(a, b, 100);
                        let got: Vec<u64> = match progression_meet(a, b) {
                            None => vec![],
                            Some(m) => (0..=100)
                                .map(|n| m.apply(n))
                                .take_while(|&t| t <= 100)
                                .collect(),
                        };
                        assert_eq!(got, expected, "a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn doubles_and_triples_meet_in_multiples_of_six() {
        // r(2i) = r(3j) gives indices 0, 6, 12, …; in the i-parameter that is 3ℕ.
        let m = progression_meet(IndexMap::new(2, 0).unwrap(), IndexMap::new(3, 0).unwrap()).unwrap();
        assert_eq!((m.stride(), m.offset()), (3, 0));
    }
}
