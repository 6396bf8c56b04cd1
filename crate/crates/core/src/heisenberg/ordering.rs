use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HeisenbergState, NormalWord, Op};
use crate::exactpoly::{int, Rational};

/// Applies one mode operator to a state: creation modes multiply,
/// `a_{-k}` (k >= 0) acts as `d/db_k` and `b_{-m}` (m >= 1) as `-d/da_m`.
pub fn apply_op(op: Op, v: &HeisenbergState) -> HeisenbergState {
    let mut out = HeisenbergState::zero();
    for (w, c) in v.terms() {
        match op {
            Op::A(i, m) if m >= 1 => out.add_term(w.with_a((i as u16, m as i32)), c.clone()),
            Op::B(j, n) if n >= 0 => out.add_term(w.with_b((j as u16, n as i32)), c.clone()),
            Op::A(i, m) => {
                if let Some((rest, e)) = w.without_b((i as u16, (-m) as i32)) {
                    out.add_term(rest, c * int(e as i64));
                }
            }
            Op::B(j, n) => {
                if let Some((rest, e)) = w.without_a((j as u16, (-n) as i32)) {
                    out.add_term(rest, -(c * int(e as i64)));
                }
            }
        }
    }
    out
}

/// Normal form of `word . 1`, acting with the rightmost operator first.
pub fn normal_order(word: &[Op]) -> HeisenbergState {
    word.iter()
        .rev()
        .fold(HeisenbergState::vacuum(), |v, op| apply_op(*op, &v))
}

/// Which annihilator the rewriting strategy moves next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Random(u64),
}

/// Normal form of `word . 1` by commutator rewriting on the operator word:
/// an annihilator is swapped rightwards past its neighbor, `XY = YX + [X, Y]`,
/// and dies on reaching the vacuum.
pub fn normal_order_rewrite(word: &[Op], strategy: Strategy) -> HeisenbergState {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut out = HeisenbergState::zero();
    let mut work: Vec<(Vec<Op>, Rational)> = vec![(word.to_vec(), Rational::one())];
    while let Some((w, c)) = work.pop() {
        let movable: Vec<usize> = (0..w.len())
            .filter(|&p| w[p].is_annihilator() && (p + 1 == w.len() || !w[p + 1].is_annihilator()))
            .collect();
        if movable.is_empty() {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for op in &w {
                match *op {
                    Op::A(i, m) => a.push((i as u16, m as i32)),
                    Op::B(j, n) => b.push((j as u16, n as i32)),
                }
            }
            out.add_term(NormalWord::new(a, b), c);
            continue;
        }
        let p = match (strategy, rng.as_mut()) {
            (Strategy::Leftmost, _) => movable[0],
            (Strategy::Rightmost, _) => *movable.last().unwrap(),
            (Strategy::Random(_), Some(r)) => movable[r.random_range(0..movable.len())],
            (Strategy::Random(_), None) => unreachable!(),
        };
        if p + 1 == w.len() {
            continue;
        }
        let bracket = w[p].commutator(&w[p + 1]);
        if bracket != 0 {
            let mut shorter = w.clone();
            shorter.drain(p..p + 2);
            work.push((shorter, &c * int(bracket)));
        }
        let mut swapped = w;
        swapped.swap(p, p + 1);
        work.push((swapped, c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_examples() {
        let one = HeisenbergState::vacuum();
        let expect = one.scale(&-Rational::one());
        let word = [Op::B(1, -1), Op::A(1, 1)];
        assert_eq!(normal_order(&word), expect);
        assert_eq!(normal_order_rewrite(&word, Strategy::Leftmost), expect);

        assert!(normal_order(&[Op::A(1, 1), Op::B(1, -1)]).is_zero());
        assert!(normal_order_rewrite(&[Op::A(1, 1), Op::B(1, -1)], Strategy::Rightmost).is_zero());

        let commuting = [Op::B(2, 1), Op::A(1, 1)];
        let w = HeisenbergState::word(NormalWord::new(vec![(1, 1)], vec![(2, 1)]));
        assert_eq!(normal_order(&commuting), w);
        assert_eq!(normal_order_rewrite(&commuting, Strategy::Random(7)), w);
    }

    #[test]
    fn repeated_annihilation_counts_multiplicity() {
        let word = [Op::A(1, 0), Op::A(1, 0), Op::B(1, 0), Op::B(1, 0)];
        let two = HeisenbergState::vacuum().scale(&int(2));
        assert_eq!(normal_order(&word), two);
        for s in [Strategy::Leftmost, Strategy::Rightmost, Strategy::Random(3)] {
            assert_eq!(normal_order_rewrite(&word, s), two);
        }
    }
}
