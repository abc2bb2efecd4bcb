// Seeded generators and brute-force oracles shared by the integration tests.
// The oracles deliberately avoid the library's evaluator and enumerator.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use siminf::model::{Database, Element, FiniteStructure};
use siminf::syntax::{Formula, Signature, Symbol, Term};
use siminf::updates::{
    apply_deletion, apply_insertion, build_update, DeletionSpec, ElementRef, InsertionSpec, Operation, Update,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One or two unary relations, maybe a binary one, up to two constants.
pub fn random_signature(rng: &mut ChaCha8Rng) -> Signature {
    let mut syms = vec![Symbol::relation("P", 1).unwrap()];
    if rng.gen_bool(0.5) {
        syms.push(Symbol::relation("Q", 1).unwrap());
    }
    if rng.gen_bool(0.5) {
        syms.push(Symbol::relation("R", 2).unwrap());
    }
    for c in ["c", "d"].iter().take(rng.gen_range(0..=2)) {
        syms.push(Symbol::constant(*c).unwrap());
    }
    Signature::from_symbols(syms).unwrap()
}

pub fn elements(n: usize) -> Vec<Element> {
    (1..=n).map(|i| Element::new(format!("e{i}"))).collect()
}

fn tuples(domain: &[Element], arity: usize) -> Vec<Vec<Element>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                domain.iter().map(move |e| {
                    let mut t = t.clone();
                    t.push(e.clone());
                    t
                })
            })
            .collect();
    }
    out
}

pub fn random_structure(sig: &Signature, rng: &mut ChaCha8Rng, max_domain: usize) -> FiniteStructure {
    let domain = elements(rng.gen_range(1..=max_domain));
    let constants = sig
        .constants()
        .map(|c| (c.to_string(), domain.choose(rng).unwrap().clone()))
        .collect();
    let relations = sig
        .relations()
        .map(|(r, a)| {
            let ts = tuples(&domain, a).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            (r.to_string(), ts)
        })
        .collect();
    FiniteStructure::new(sig.clone(), domain.into_iter().collect(), constants, relations).unwrap()
}

fn random_term(sig: &Signature, vars: &[String], rng: &mut ChaCha8Rng) -> Term {
    let consts: Vec<&str> = sig.constants().collect();
    let k = rng.gen_range(0..vars.len() + consts.len());
    if k < vars.len() {
        Term::var(vars[k].clone())
    } else {
        Term::constant(consts[k - vars.len()])
    }
}

fn random_atom(sig: &Signature, vars: &[String], rng: &mut ChaCha8Rng) -> Formula {
    let rels: Vec<(&str, usize)> = sig.relations().collect();
    if rng.gen_bool(0.15) {
        return Formula::eq(random_term(sig, vars, rng), random_term(sig, vars, rng));
    }
    let (r, a) = *rels.choose(rng).unwrap();
    Formula::atom(r, (0..a).map(|_| random_term(sig, vars, rng)).collect::<Vec<_>>())
}

fn gen(sig: &Signature, rng: &mut ChaCha8Rng, vars: &mut Vec<String>, depth: usize) -> Formula {
    let no_terms = vars.is_empty() && sig.constants().next().is_none();
    if depth == 0 || (!no_terms && rng.gen_bool(0.3)) {
        return random_atom(sig, vars, rng);
    }
    let pick = if no_terms { rng.gen_range(5..7) } else { rng.gen_range(0..7) };
    let sub = |rng: &mut ChaCha8Rng, vars: &mut Vec<String>| gen(sig, rng, vars, depth - 1);
    match pick {
        0 => Formula::not(sub(rng, vars)),
        1 => Formula::and(sub(rng, vars), sub(rng, vars)),
        2 => Formula::or(sub(rng, vars), sub(rng, vars)),
        3 => Formula::implies(sub(rng, vars), sub(rng, vars)),
        4 => Formula::iff(sub(rng, vars), sub(rng, vars)),
        q => {
            let v = format!("x{}", vars.len());
            vars.push(v.clone());
            let body = sub(rng, vars);
            vars.pop();
            if q == 5 {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
    }
}

/// A closed formula of depth at most `depth` (at least 1 when the
/// signature has no constants).
pub fn random_sentence(sig: &Signature, rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    gen(sig, rng, &mut Vec::new(), depth.max(1))
}

/// Quantifier-free sentence over the constants; the signature must have one.
pub fn random_ground(sig: &Signature, rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_atom(sig, &[], rng);
    }
    let sub = |rng: &mut ChaCha8Rng| random_ground(sig, rng, depth - 1);
    match rng.gen_range(0..3) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        _ => Formula::or(sub(rng), sub(rng)),
    }
}

/// A correct database: the theory keeps only sampled sentences true in the
/// structure.
pub fn random_database(rng: &mut ChaCha8Rng, max_domain: usize, max_theory: usize, depth: usize) -> Database {
    let sig = random_signature(rng);
    let s = random_structure(&sig, rng, max_domain);
    let want = rng.gen_range(0..=max_theory);
    let mut theory = Vec::new();
    for _ in 0..40 {
        if theory.len() >= want {
            break;
        }
        let f = random_sentence(&sig, rng, depth);
        if oracle_holds(&s, &f) && !theory.contains(&f) {
            theory.push(f);
        }
    }
    Database::new(s, theory).unwrap()
}

fn symbols_in(f: &Formula, out: &mut BTreeMap<String, usize>) {
    match f {
        Formula::Atom { relation, args } => {
            out.insert(relation.clone(), args.len());
            for t in args {
                if let Term::Const(c) = t {
                    out.insert(c.clone(), 0);
                }
            }
        }
        Formula::Eq(a, b) => {
            for t in [a, b] {
                if let Term::Const(c) = t {
                    out.insert(c.clone(), 0);
                }
            }
        }
        Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => symbols_in(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            symbols_in(a, out);
            symbols_in(b, out);
        }
    }
}

fn eval(s: &FiniteStructure, f: &Formula, env: &mut Vec<(String, Element)>) -> bool {
    let term = |t: &Term, env: &Vec<(String, Element)>| -> Element {
        match t {
            Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).expect("bound").1.clone(),
            Term::Const(c) => s.constant(c).expect("interpreted").clone(),
        }
    };
    match f {
        Formula::Atom { relation, args } => {
            let t: Vec<Element> = args.iter().map(|a| term(a, env)).collect();
            s.relation(relation).expect("interpreted").contains(&t)
        }
        Formula::Eq(a, b) => term(a, env) == term(b, env),
        Formula::Not(a) => !eval(s, a, env),
        Formula::And(a, b) => eval(s, a, env) && eval(s, b, env),
        Formula::Or(a, b) => eval(s, a, env) || eval(s, b, env),
        Formula::Implies(a, b) => !eval(s, a, env) || eval(s, b, env),
        Formula::Iff(a, b) => eval(s, a, env) == eval(s, b, env),
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let universal = matches!(f, Formula::Forall(..));
            let domain: Vec<Element> = s.domain().iter().cloned().collect();
            for e in domain {
                env.push((v.clone(), e));
                let r = eval(s, a, env);
                env.pop();
                if r != universal {
                    return !universal;
                }
            }
            universal
        }
    }
}

/// Tarskian truth by direct recursion; false when a symbol is missing.
pub fn oracle_holds(s: &FiniteStructure, f: &Formula) -> bool {
    let mut syms = BTreeMap::new();
    symbols_in(f, &mut syms);
    if syms.iter().any(|(n, a)| s.signature().arity(n) != Some(*a)) {
        return false;
    }
    eval(s, f, &mut Vec::new())
}

/// Every structure over exactly `vocab` with domain `{e0..e(n-1)}`.
pub fn all_structures(vocab: &BTreeMap<String, usize>, n: usize) -> Vec<FiniteStructure> {
    let domain: Vec<Element> = (0..n).map(|i| Element::new(format!("e{i}"))).collect();
    let sig = Signature::from_symbols(vocab.iter().map(|(k, a)| Symbol::new(k.clone(), *a).unwrap())).unwrap();
    type Partial = (BTreeMap<String, Element>, BTreeMap<String, BTreeSet<Vec<Element>>>);
    let mut partial: Vec<Partial> = vec![(BTreeMap::new(), BTreeMap::new())];
    for (name, &arity) in vocab {
        let mut next = Vec::new();
        for (cs, rs) in &partial {
            if arity == 0 {
                for e in &domain {
                    let mut cs = cs.clone();
                    cs.insert(name.clone(), e.clone());
                    next.push((cs, rs.clone()));
                }
            } else {
                let all = tuples(&domain, arity);
                for mask in 0u64..(1 << all.len()) {
                    let set = all
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, t)| t.clone())
                        .collect();
                    let mut rs = rs.clone();
                    rs.insert(name.clone(), set);
                    next.push((cs.clone(), rs));
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|(cs, rs)| FiniteStructure::new(sig.clone(), domain.iter().cloned().collect(), cs, rs).unwrap())
        .collect()
}

/// Brute-force bounded entailment over every domain size up to `k`.
pub fn oracle_entails(theory: &[Formula], target: &Formula, k: usize) -> bool {
    let mut vocab = BTreeMap::new();
    for f in theory.iter().chain([target]) {
        symbols_in(f, &mut vocab);
    }
    (1..=k).all(|n| {
        all_structures(&vocab, n)
            .iter()
            .all(|s| !theory.iter().all(|t| oracle_holds(s, t)) || oracle_holds(s, target))
    })
}

pub fn oracle_coherency(u: &Update, f: &Formula) -> (u64, u64) {
    let truth: Vec<bool> = u.structures().iter().map(|s| oracle_holds(s, f)).collect();
    if !truth.last().copied().unwrap_or(false) {
        return (0, 1);
    }
    let m = truth.iter().position(|&t| t).unwrap() as u64 + 1;
    let sum: u64 = (1..=m).sum();
    (m, sum)
}

/// Every syntactically possible operation on `s`, drawing insertion
/// symbols from `vocab` and allowing element `fresh` when given.
pub fn all_operations(s: &FiniteStructure, vocab: &Signature, fresh: Option<&str>) -> Vec<Operation> {
    let mut pool: Vec<ElementRef> = s.domain().iter().map(|e| ElementRef::existing(e.id())).collect();
    if let Some(f) = fresh {
        pool.push(ElementRef::fresh(f));
    }
    let mut ops = Vec::new();
    for sym in vocab.iter() {
        let mut payloads: Vec<Vec<ElementRef>> = vec![Vec::new()];
        for _ in 0..sym.arity().max(1) {
            payloads = payloads
                .into_iter()
                .flat_map(|p| {
                    pool.iter().map(move |e| {
                        let mut p = p.clone();
                        p.push(e.clone());
                        p
                    })
                })
                .collect();
        }
        for p in payloads {
            ops.push(Operation::Insert(InsertionSpec { symbol: sym.clone(), payload: p }));
        }
    }
    for sym in s.signature().iter() {
        if sym.is_constant() {
            let old = s.constant(sym.name()).unwrap();
            for e in s.domain() {
                let spec = DeletionSpec::constant(sym.name(), e.id()).unwrap();
                ops.push(Operation::Delete(spec.clone()));
                ops.push(Operation::Delete(spec.dropping([old.id()])));
            }
        } else {
            for t in s.relation(sym.name()).unwrap() {
                let ids: Vec<&str> = t.iter().map(Element::id).collect();
                let distinct: Vec<&str> = ids.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
                for mask in 0u32..(1 << distinct.len()) {
                    let drop = distinct.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e);
                    ops.push(Operation::Delete(DeletionSpec::tuple(sym.name(), &ids).unwrap().dropping(drop)));
                }
            }
        }
    }
    ops
}

pub fn apply(d: &Database, op: &Operation) -> Option<Database> {
    match op {
        Operation::Insert(i) => apply_insertion(d, i).ok(),
        Operation::Delete(x) => apply_deletion(d, x).ok(),
    }
}

fn uses_fresh(op: &Operation) -> bool {
    matches!(op, Operation::Insert(i) if i.payload.iter().any(|e| e.fresh))
}

/// Length of the shortest valid update making `f` true, found by trying
/// every operation sequence; `None` if there is none within `max_steps`.
pub fn oracle_min_steps(d: &Database, f: &Formula, max_steps: usize, max_fresh: usize) -> Option<usize> {
    let vocab = d.signature().union(&syms_of(f)).unwrap();
    let mut frontier = vec![(d.clone(), 0usize)];
    for len in 0..=max_steps {
        if frontier.iter().any(|(x, _)| oracle_holds(x.structure(), f)) {
            return Some(len);
        }
        if len == max_steps {
            break;
        }
        let mut next = Vec::new();
        for (x, used) in &frontier {
            let name = format!("f{}", used + 1);
            let fresh = (*used < max_fresh).then_some(name.as_str());
            for op in all_operations(x.structure(), &vocab, fresh) {
                if let Some(y) = apply(x, &op) {
                    next.push((y, used + usize::from(uses_fresh(&op))));
                }
            }
        }
        frontier = next;
    }
    None
}

pub fn syms_of(f: &Formula) -> Signature {
    let mut m = BTreeMap::new();
    symbols_in(f, &mut m);
    Signature::from_symbols(m.into_iter().map(|(k, a)| Symbol::new(k, a).unwrap())).unwrap()
}

/// A valid update of up to `max_len` random steps over `vocab`.
pub fn random_update(d: &Database, vocab: &Signature, rng: &mut ChaCha8Rng, max_len: usize) -> Update {
    let want = rng.gen_range(0..=max_len);
    let mut ops = Vec::new();
    let mut cur = d.clone();
    let mut fresh = 0;
    for _ in 0..want {
        let name = format!("f{}", fresh + 1);
        let mut cands = all_operations(cur.structure(), vocab, Some(&name));
        cands.shuffle(rng);
        let Some((op, next)) = cands.into_iter().find_map(|op| apply(&cur, &op).map(|n| (op, n))) else {
            break;
        };
        fresh += usize::from(uses_fresh(&op));
        ops.push(op);
        cur = next;
    }
    build_update(d, &ops).expect("every step was validated")
}

/// Valid deductions by construction: premises and a conclusion they entail.
pub fn random_valid_deduction(sig: &Signature, rng: &mut ChaCha8Rng, depth: usize) -> (Vec<Formula>, Formula) {
    let p = random_sentence(sig, rng, depth);
    let q = random_sentence(sig, rng, depth);
    match rng.gen_range(0..5) {
        0 => (vec![p.clone()], Formula::or(p, q)),
        1 => (vec![p.clone(), q.clone()], Formula::and(p, q)),
        2 => (vec![Formula::and(p, q.clone())], q),
        3 => (vec![p.clone(), Formula::implies(p, q.clone())], q),
        _ => (vec![Formula::not(Formula::not(p.clone()))], p),
    }
}
