use graphcanon::gen::small_corpus;
use graphcanon::oracle::{brute_aut, brute_canon, orbit_classes};
use graphcanon::runner::random_permutation;
use graphcanon::RunConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[test]
fn every_config_matches_the_oracle_on_small_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let corpus = small_corpus(7, 80, &mut rng);
    let mut configs = RunConfig::grid();
    configs.extend(RunConfig::grid().into_iter().map(|c| c.without_pruning()));
    let failures: Vec<String> = corpus
        .par_iter()
        .enumerate()
        .flat_map_iter(|(gi, (name, g))| {
            let mut rng = ChaCha8Rng::seed_from_u64(gi as u64);
            let want = brute_canon(g).unwrap();
            let auts = brute_aut(g).unwrap();
            let orbits = orbit_classes(g.n(), &auts);
            let relabeled: Vec<_> = (0..3).map(|_| g.permuted(&random_permutation(g.n(), &mut rng)).unwrap()).collect();
            let mut fails = Vec::new();
            for c in &configs {
                let mut forms = Vec::new();
                for h in std::iter::once(g).chain(relabeled.iter()) {
                    let report = c.canonicalize(h).unwrap();
                    for gamma in &report.generators {
                        if !h.is_automorphism(gamma) {
                            fails.push(format!("{name} {}: non-automorphism {gamma}", c.label()));
                        }
                    }
                    if std::ptr::eq(h, g) {
                        let o = orbit_classes(g.n(), &report.generators);
                        if o != orbits {
                            fails.push(format!("{name} {}: orbits {o:?} != {orbits:?}", c.label()));
                        }
                    }
                    forms.push(h.permuted(&report.canonical).unwrap());
                }
                if !forms.iter().all(|f| f.repr_eq(&forms[0])) {
                    fails.push(format!("{name} {}: relabelings disagree", c.label()));
                }
                if !brute_canon(&forms[0]).unwrap().repr_eq(&want) {
                    fails.push(format!("{name} {}: not isomorphic", c.label()));
                }
            }
            fails
        })
        .collect();
    assert!(failures.is_empty(), "{} failures:\n{}", failures.len(), failures.iter().take(40).cloned().collect::<Vec<_>>().join("\n"));
}
