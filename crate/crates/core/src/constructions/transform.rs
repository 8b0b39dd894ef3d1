//! Day terms from Jónsson terms.

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::term::Term;
use crate::terms::chain::{Scheme, TermChain};

/// Day terms `d_0 .. d_{2n}` built from Jónsson terms `j_0 .. j_{n+1}` with
/// `n` even:
///
/// ```text
/// d_{4i}   = j_{2i}(x,y,w)     d_{4i+1} = j_{2i+1}(x,y,w)
/// d_{4i+2} = j_{2i+1}(x,z,w)   d_{4i+3} = j_{2i+2}(x,z,w)
/// d_{2n-1} = j_n(y,z,w)        d_{2n}   = w
/// ```
pub fn jonsson_to_day(chain: &TermChain) -> Result<TermChain> {
    let Scheme::Jonsson(n) = chain.scheme else {
        return Err(Error::InvalidArgument(format!(
            "expected a Jónsson chain, got {}",
            chain.scheme
        )));
    };
    if n % 2 == 1 {
        return Err(Error::Constraint(format!("Jónsson to Day needs n even, got {n}")));
    }
    let (x, y, z, w) = (Term::Var(0), Term::Var(1), Term::Var(2), Term::Var(3));
    let j = |i: usize, args: [&Term; 3]| chain.terms[i].substitute(&args.map(Term::clone));
    let mut terms = Vec::with_capacity(2 * n + 1);
    for t in 0..=2 * n {
        let (i, r) = (t / 4, t % 4);
        terms.push(if t == 2 * n {
            w.clone()
        } else if t + 1 == 2 * n {
            j(n, [&y, &z, &w])?
        } else {
            match r {
                0 => j(2 * i, [&x, &y, &w])?,
                1 => j(2 * i + 1, [&x, &y, &w])?,
                2 => j(2 * i + 1, [&x, &z, &w])?,
                _ => j(2 * i + 2, [&x, &z, &w])?,
            }
        });
    }
    TermChain::new(Scheme::Day(2 * n), terms)
}

/// [`jonsson_to_day`] with the input and output verified on `alg`. Odd `n` is
/// first padded by one projection.
pub fn jonsson_to_day_on(alg: &FiniteAlgebra, chain: &TermChain) -> Result<TermChain> {
    let Scheme::Jonsson(n) = chain.scheme else {
        return Err(Error::InvalidArgument(format!(
            "expected a Jónsson chain, got {}",
            chain.scheme
        )));
    };
    let input = if n % 2 == 1 { chain.pad() } else { chain.clone() };
    if let Some(v) = input.verify(alg)?.violations.first() {
        return Err(Error::InvalidChain(format!("input fails {}", v.equation)));
    }
    let day = jonsson_to_day(&input)?;
    if let Some(v) = day.verify(alg)?.violations.first() {
        return Err(Error::InvalidChain(format!("output fails {}", v.equation)));
    }
    Ok(day)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::free::FreeOptions;
    use crate::terms::search::search_jonsson;

    #[test]
    fn odd_n_is_rejected() {
        let c = TermChain::new(Scheme::Jonsson(1), vec![Term::Var(0), Term::Var(0), Term::Var(2)]).unwrap();
        assert!(matches!(jonsson_to_day(&c), Err(Error::Constraint(_))));
    }

    #[test]
    fn n_two_gives_five_terms() {
        let lat = corpus::lattice2();
        let found = search_jonsson(&lat, 4, false, FreeOptions::default()).unwrap();
        let chain = found.found().unwrap().chain.clone();
        let day = jonsson_to_day_on(&lat, &chain).unwrap();
        assert_eq!(day.scheme, Scheme::Day(4));
        assert_eq!(day.terms.len(), 5);
        assert_eq!(day.terms[4], Term::Var(3));
    }
}
