use super::{Letter, NormalWord};
use crate::context::TruncationContext;

/// All normal words of weight at most `w` over `ctx.charts` charts with at
/// most `ctx.b0_cap` factors `b^j_0`, ordered by weight and then by word.
pub fn basis_upto(w: i64, ctx: &TruncationContext) -> Vec<NormalWord> {
    if w < 0 {
        return Vec::new();
    }
    let n = ctx.charts as u16;
    // positive-weight letters, tagged true for a-letters
    let mut letters: Vec<(bool, Letter)> = Vec::new();
    for mode in 1..=w as i32 {
        for chart in 1..=n {
            letters.push((true, (chart, mode)));
        }
        for chart in 1..=n {
            letters.push((false, (chart, mode)));
        }
    }
    let mut positive: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    collect_multisets(&letters, 0, w, &mut current, &mut positive);

    let mut b0: Vec<Vec<Letter>> = Vec::new();
    let mut cur0 = Vec::new();
    collect_b0(n, 1, ctx.b0_cap, &mut cur0, &mut b0);

    let mut out = Vec::with_capacity(positive.len() * b0.len());
    for choice in &positive {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for &idx in choice {
            let (is_a, l) = letters[idx];
            if is_a {
                a.push(l);
            } else {
                b.push(l);
            }
        }
        for zeros in &b0 {
            let mut bb = b.clone();
            bb.extend_from_slice(zeros);
            out.push(NormalWord::new(a.clone(), bb));
        }
    }
    out.sort_by(|x, y| x.weight().cmp(&y.weight()).then_with(|| x.cmp(y)));
    out
}

fn collect_multisets(
    letters: &[(bool, Letter)],
    start: usize,
    budget: i64,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    out.push(current.clone());
    for idx in start..letters.len() {
        let weight = letters[idx].1 .1 as i64;
        if weight > budget {
            break;
        }
        current.push(idx);
        collect_multisets(letters, idx, budget - weight, current, out);
        current.pop();
    }
}

fn collect_b0(n: u16, start: u16, cap: u32, current: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
    out.push(current.clone());
    if cap == 0 {
        return;
    }
    for chart in start..=n {
        current.push((chart, 0));
        collect_b0(n, chart, cap - 1, current, out);
        current.pop();
    }
}

/// Size of [`basis_upto`] from the generating function
/// `prod_{k >= 1} (1 - x^k)^{-2N}` times the number of `b_0` monomials of degree `<= cap`.
pub fn basis_count(w: i64, charts: usize, b0_cap: u32) -> u128 {
    if w < 0 {
        return 0;
    }
    let w = w as usize;
    let mut series = vec![0u128; w + 1];
    series[0] = 1;
    for k in 1..=w {
        for _ in 0..2 * charts {
            for i in k..=w {
                series[i] += series[i - k];
            }
        }
    }
    let positive: u128 = series.iter().sum();
    let mut zero_modes: u128 = 0;
    for d in 0..=b0_cap as u128 {
        zero_modes += binomial(charts as u128 + d - 1, d);
    }
    positive * zero_modes
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut out = 1u128;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}
