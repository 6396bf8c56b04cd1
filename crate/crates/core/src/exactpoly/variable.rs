use std::fmt;

use serde::{Deserialize, Serialize};

/// A polynomial variable.
///
/// The derived order (family, chart, mode, point, index) is the canonical
/// order used for monomials, rendering and serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variable {
    /// Loop coordinate `b^chart_mode`; `point` is 0 in the single-point
    /// setting and `1..=k` for the multi-point coordinates `b^chart_{mode,point}`.
    B { chart: u16, mode: i32, point: u16 },
    /// Heisenberg mode `a^chart_mode`, used only for state bookkeeping.
    A { chart: u16, mode: i32 },
    /// Base coordinate `lambda_i` of a point configuration.
    Lambda(u16),
    /// Auxiliary parameter.
    Aux(u32),
    /// Chart coordinate `b^i` on the target affine space.
    Coord(u16),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VariableFamily {
    B,
    A,
    Lambda,
    Aux,
    Coord,
}

impl Variable {
    pub fn b(chart: usize, mode: i64) -> Variable {
        Variable::B {
            chart: chart as u16,
            mode: mode as i32,
            point: 0,
        }
    }

    pub fn b_at(chart: usize, mode: i64, point: usize) -> Variable {
        Variable::B {
            chart: chart as u16,
            mode: mode as i32,
            point: point as u16,
        }
    }

    pub fn a(chart: usize, mode: i64) -> Variable {
        Variable::A {
            chart: chart as u16,
            mode: mode as i32,
        }
    }

    pub fn lam(i: usize) -> Variable {
        Variable::Lambda(i as u16)
    }

    pub fn aux(k: usize) -> Variable {
        Variable::Aux(k as u32)
    }

    pub fn coord(i: usize) -> Variable {
        Variable::Coord(i as u16)
    }

    pub fn family(&self) -> VariableFamily {
        match self {
            Variable::B { .. } => VariableFamily::B,
            Variable::A { .. } => VariableFamily::A,
            Variable::Lambda(_) => VariableFamily::Lambda,
            Variable::Aux(_) => VariableFamily::Aux,
            Variable::Coord(_) => VariableFamily::Coord,
        }
    }

    /// Mode of a loop coordinate, `None` for every other family.
    #[inline]
    pub fn b_mode(&self) -> Option<i64> {
        match self {
            Variable::B { mode, .. } => Some(*mode as i64),
            _ => None,
        }
    }

    #[inline]
    pub fn is_negative_b(&self) -> bool {
        matches!(self, Variable::B { mode, .. } if *mode < 0)
    }

    pub fn chart(&self) -> Option<usize> {
        match self {
            Variable::B { chart, .. } | Variable::A { chart, .. } | Variable::Coord(chart) => {
                Some(*chart as usize)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::B {
                chart,
                mode,
                point: 0,
            } => write!(f, "b[{},{}]", chart, mode),
            Variable::B { chart, mode, point } => write!(f, "b[{},{},{}]", chart, mode, point),
            Variable::A { chart, mode } => write!(f, "a[{},{}]", chart, mode),
            Variable::Lambda(i) => write!(f, "lam[{}]", i),
            Variable::Aux(k) => write!(f, "aux[{}]", k),
            Variable::Coord(i) => write!(f, "b[{}]", i),
        }
    }
}

/// Parses the token syntax `b[i]`, `b[i,n]`, `b[i,n,v]`, `a[i,n]`, `lam[i]`, `aux[k]`.
pub fn parse_variable(token: &str) -> Option<Variable> {
    let token = token.trim();
    let open = token.find('[')?;
    if !token.ends_with(']') {
        return None;
    }
    let head = &token[..open];
    let body = &token[open + 1..token.len() - 1];
    let fields: Vec<i64> = body
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .ok()?;
    let chart_ok = |c: i64| (1..=u16::MAX as i64).contains(&c);
    let mode_ok = |m: i64| (i32::MIN as i64..=i32::MAX as i64).contains(&m);
    match (head, fields.as_slice()) {
        ("b", [i]) if chart_ok(*i) => Some(Variable::coord(*i as usize)),
        ("b", [i, n]) if chart_ok(*i) && mode_ok(*n) => Some(Variable::b(*i as usize, *n)),
        ("b", [i, n, v]) if chart_ok(*i) && mode_ok(*n) && chart_ok(*v) => {
            Some(Variable::b_at(*i as usize, *n, *v as usize))
        }
        ("a", [i, n]) if chart_ok(*i) && mode_ok(*n) => Some(Variable::a(*i as usize, *n)),
        ("lam", [i]) if chart_ok(*i) => Some(Variable::lam(*i as usize)),
        ("aux", [k]) if (0..=u32::MAX as i64).contains(k) => Some(Variable::aux(*k as usize)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_family_chart_mode_point() {
        let mut vars = vec![
            Variable::coord(1),
            Variable::aux(0),
            Variable::lam(2),
            Variable::a(1, 1),
            Variable::b_at(1, 0, 2),
            Variable::b(2, -3),
            Variable::b(1, 0),
            Variable::b(1, -1),
        ];
        vars.sort();
        let rendered: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        assert_eq!(
            rendered,
            vec!["b[1,-1]", "b[1,0]", "b[1,0,2]", "b[2,-3]", "a[1,1]", "lam[2]", "aux[0]", "b[1]"]
        );
    }

    #[test]
    fn tokens_round_trip() {
        for tok in ["b[1,-2]", "b[3,4,2]", "a[2,1]", "lam[1]", "aux[7]", "b[2]"] {
            assert_eq!(parse_variable(tok).unwrap().to_string(), tok);
        }
    }

    #[test]
    fn malformed_tokens_rejected() {
        for tok in ["b[1,0,0,0]", "b[0,1]", "c[1,1]", "b[1,x]", "b[1,0,0]", "lam[]", "b1,0]"] {
            assert!(parse_variable(tok).is_none(), "{tok} should not parse");
        }
    }
}
