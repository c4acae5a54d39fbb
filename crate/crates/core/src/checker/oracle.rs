//! Bounded lasso enumeration and direct evaluation of LTL on
//! ultimately periodic paths.

use super::{resolve_atoms, CheckError, Lasso};
use crate::ltl::LtlFormula;
use crate::semantics::{State, StateSpace, TransitionSystem};

/// Largest state space the oracle accepts.
pub const ORACLE_LIMIT: usize = 4096;

/// Truth of `f` at every position of a lasso with `n` positions whose
/// cycle starts at `l`; position `n - 1` is followed by `l`.
fn eval(f: &LtlFormula, n: usize, l: usize, atom: &impl Fn(&str, usize) -> bool) -> Vec<bool> {
    use LtlFormula as L;
    let succ = |i: usize| if i + 1 < n { i + 1 } else { l };
    // Positions visited from i onwards: i..n, then the cycle again.
    let window = |i: usize| i.min(l)..n;
    match f {
        L::True => vec![true; n],
        L::False => vec![false; n],
        L::Atom(a) => (0..n).map(|i| atom(a, i)).collect(),
        L::Not(a) => eval(a, n, l, atom).into_iter().map(|x| !x).collect(),
        L::Next(a) => {
            let a = eval(a, n, l, atom);
            (0..n).map(|i| a[succ(i)]).collect()
        }
        L::Finally(a) => {
            let a = eval(a, n, l, atom);
            (0..n).map(|i| a[window(i)].iter().any(|&x| x)).collect()
        }
        L::Globally(a) => {
            let a = eval(a, n, l, atom);
            (0..n).map(|i| a[window(i)].iter().all(|&x| x)).collect()
        }
        L::And(a, b) | L::Or(a, b) | L::Xor(a, b) | L::Implies(a, b) => {
            let (a, b) = (eval(a, n, l, atom), eval(b, n, l, atom));
            let op: fn(bool, bool) -> bool = match f {
                L::And(..) => |x, y| x && y,
                L::Or(..) => |x, y| x || y,
                L::Xor(..) => |x, y| x != y,
                _ => |x, y| !x || y,
            };
            a.iter().zip(&b).map(|(&x, &y)| op(x, y)).collect()
        }
    }
}

/// Truth of `f` on the infinite path `prefix · cycle^ω`.
pub fn eval_lasso(sys: &TransitionSystem, f: &LtlFormula, lasso: &Lasso) -> Result<bool, CheckError> {
    let atoms = resolve_atoms(sys, f)?;
    let (positions, l) = lasso.positions();
    let atom = |a: &str, i: usize| {
        let idx = atoms.iter().find(|(n, _)| n == a).expect("resolved atom").1;
        sys.holds(positions[i], idx)
    };
    Ok(eval(f, positions.len(), l, &atom)[0])
}

fn is_primitive(cycle: &[usize]) -> bool {
    let n = cycle.len();
    !(1..n).any(|p| n.is_multiple_of(p) && (p..n).all(|i| cycle[i] == cycle[i - p]))
}

/// First violating canonical lasso of at most `depth` positions, in
/// depth-first order over successor lists.
pub(crate) fn search(
    sys: &TransitionSystem,
    space: &StateSpace,
    f: &LtlFormula,
    atoms: &[(String, usize)],
    depth: usize,
) -> Option<Lasso<usize>> {
    let states: &[State] = &space.states;
    let violates = |path: &[usize], j: usize| {
        let atom = |a: &str, i: usize| {
            let idx = atoms.iter().find(|(n, _)| n == a).expect("resolved atom").1;
            sys.holds(&states[path[i]], idx)
        };
        !eval(f, path.len(), j, &atom)[0]
    };

    let mut path = vec![0usize];
    let mut cursor = vec![0usize];
    loop {
        // Close the current path into every canonical lasso it admits.
        let last = *path.last().expect("path is nonempty");
        for j in 0..path.len() {
            if !space.successors[last].contains(&path[j]) {
                continue;
            }
            if j > 0 && path[j - 1] == last {
                continue;
            }
            if !is_primitive(&path[j..]) {
                continue;
            }
            if violates(&path, j) {
                return Some(Lasso {
                    prefix: path[..j].to_vec(),
                    cycle: path[j..].to_vec(),
                });
            }
        }
        // Advance to the next path in depth-first order.
        loop {
            let top = path.len() - 1;
            let succ = &space.successors[path[top]];
            if path.len() < depth && cursor[top] < succ.len() {
                let next = succ[cursor[top]];
                cursor[top] += 1;
                path.push(next);
                cursor.push(0);
                break;
            }
            path.pop();
            cursor.pop();
            if path.is_empty() {
                return None;
            }
        }
    }
}
