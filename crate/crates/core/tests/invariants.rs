use proptest::prelude::*;

use twosig::lang_std;
use twosig::reduction::step_all;
use twosig::syntax::text::{parse_term, print_term, Notation};
use twosig::syntax::{rename, subst, typecheck, weaken, Context, Sort, SubstMap, Term, TermGen};
use twosig::Language;

fn langs() -> [Language; 3] {
    [lang_std::pcf(), lang_std::ulc(), lang_std::stlc()]
}

/// A random well-sorted term: (language index, context, sort, term).
fn sample(which: usize, seed: u64, depth: usize) -> Option<(Context, Sort, Term)> {
    let lang = &langs()[which];
    let mut gen = TermGen::new(lang, seed);
    let ctx = gen.random_context(3);
    let (sort, t) = gen.any_term(&ctx, depth)?;
    Some((ctx, sort, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_terms_have_their_sort(which in 0..3usize, seed: u64, depth in 0..6usize) {
        let Some((ctx, sort, t)) = sample(which, seed, depth) else { return Ok(()) };
        prop_assert_eq!(typecheck(&langs()[which], &ctx, &t), Ok(sort));
    }

    #[test]
    fn identity_substitution(which in 0..3usize, seed: u64, depth in 0..6usize) {
        let Some((ctx, _, t)) = sample(which, seed, depth) else { return Ok(()) };
        prop_assert_eq!(subst(&t, &SubstMap::identity(&ctx)), t);
    }

    #[test]
    fn renamings_compose(which in 0..3usize, seed: u64, a in 0..4usize, b in 0..4usize) {
        let Some((_, _, t)) = sample(which, seed, 4) else { return Ok(()) };
        let f = move |i: usize| i + a;
        let g = move |i: usize| if i.is_multiple_of(2) { i + b } else { i };
        prop_assert_eq!(rename(&rename(&t, f), g), rename(&t, move |i| g(f(i))));
        prop_assert_eq!(weaken(&t, a), rename(&t, f));
    }

    #[test]
    fn printing_round_trips(which in 0..3usize, seed: u64, depth in 0..6usize) {
        let Some((ctx, _, t)) = sample(which, seed, depth) else { return Ok(()) };
        let text = print_term(&t, Notation::Plain);
        prop_assert_eq!(parse_term(&langs()[which], &ctx, &text, Notation::Plain), Ok(t));
    }

    #[test]
    fn one_step_reduction_is_deterministic_and_sorted(which in 0..3usize, seed: u64, depth in 0..6usize) {
        let Some((ctx, sort, t)) = sample(which, seed, depth) else { return Ok(()) };
        let lang = &langs()[which];
        let steps = step_all(lang, &t);
        prop_assert_eq!(&steps, &step_all(lang, &t));
        for w in steps.windows(2) {
            prop_assert!((&w[0].path, &w[0].rule) <= (&w[1].path, &w[1].rule));
        }
        for s in &steps {
            prop_assert_eq!(typecheck(lang, &ctx, &s.result), Ok(sort.clone()));
        }
    }
}
