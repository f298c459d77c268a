//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.

mod oracles;

use std::time::{Duration, Instant};

use quadklein::classfield::{self, UnramifiedQuadExt};
use quadklein::density;
use quadklein::embed::{self, ConjugatedEmbedding, GroupElementMatrix, Mat2};
use quadklein::ideal::{self, FracIdeal};
use quadklein::invar::{self, FiberPoint, FiberSubject, NormPattern, RdpFamily};
use quadklein::klein;
use quadklein::{make_field, Error, FieldElement, QuadraticField};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn lib<T>(r: quadklein::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure!(t < limit, "took {:.1?}, limit {:?}", t, limit);
    Ok(())
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Check {
    let start = Instant::now();
    let k = lib(make_field(10))?;
    let a = lib(Mat2::parse(&k, r#"[[3,"4+s"],["4-s",3]]"#))?;
    ensure!(a.det() == k.int(3), "det A = {}", a.det());
    let alpha = lib(k.parse_element("4+s"))?;
    for n in [3, 4] {
        let e = lib(ConjugatedEmbedding::new(a.clone(), n))?;
        ensure!(e.rho.is_integral(), "ρ_A not integral for n = {n}");
        ensure!(lib(embed::is_conjugate_to_standard(&e))?.is_none(), "unexpected conjugator for n = {n}");
        let patches = lib(embed::zariski_trivialization(&e))?;
        ensure!(patches.len() == 3, "{} patches for n = {n}", patches.len());
        let mut s: Vec<String> = patches.iter().map(|p| p.s.to_string()).collect();
        s.sort();
        let mut want = vec![k.int(3).to_string(), alpha.to_string(), alpha.conj().to_string()];
        want.sort();
        ensure!(s == want, "inverted elements {s:?}");
        for p in &patches {
            let b = &p.conjugator;
            ensure!(b.entries().all(|x| embed::in_localization(x, &p.s)), "conjugator not over O_K[1/{}]", p.s);
            ensure!(embed::is_unit_in_localization(&b.det(), &p.s), "det not a unit over O_K[1/{}]", p.s);
            let binv = b.inv().ok_or("singular conjugator")?;
            ensure!(
                e.rho.sandwich(&binv, b) == GroupElementMatrix::standard(&k, n),
                "patch at {} does not conjugate to the standard embedding",
                p.s
            );
        }
        let cover = lib(ideal::ideal_from_generators(&patches.iter().map(|p| p.s.clone()).collect::<Vec<_>>()))?;
        ensure!(cover.is_unit_ideal(), "patches do not cover Spec O_K");
    }
    match embed::reduce_conjugator(&a) {
        Err(Error::Obstructed { prime }) => {
            let norm3: Vec<String> = ideal::primes_above(3, &k).iter().map(|p| p.to_string()).collect();
            ensure!(norm3.contains(&prime), "obstruction at {prime}, not a norm-3 prime");
        }
        other => return Err(format!("reduce_conjugator returned {other:?}")),
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("det 3, integral, not standard, obstructed at norm 3, cover {{3, α, ᾱ}} ({:.1?})", start.elapsed()))
}

// ---------------------------------------------------------------------------

fn sample_primes(k: &QuadraticField, keep: impl Fn(u64) -> bool, count: usize) -> Vec<(u64, FracIdeal)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while out.len() < count {
        if quadklein::arith::is_prime(p) && keep(p) {
            for pr in ideal::primes_above(p, k) {
                if out.len() < count {
                    out.push((p, pr));
                }
            }
        }
        p += 1;
    }
    out
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for pat in [NormPattern { q: 7, d: 6 }, NormPattern { q: 11, d: 10 }] {
        let (q, d) = (pat.q, pat.d);
        let k = lib(pat.field())?;
        let divides = |m: i64| move |p: u64| m % p as i64 == 0;
        for n in [3usize, 5] {
            let e = lib(pat.embedding(n))?;
            let computed = lib(invar::algebra_generators(&e.rho, 2 * n as u32))?;
            let degs = computed.degrees();
            let nn = n as u32;
            ensure!(degs == vec![2, nn, nn, nn, nn], "q={q} n={n}: degrees {degs:?}");
            let named = lib(pat.presentation(n))?;
            let rels = pat.relations(n);
            let ok = lib(invar::verify_relations(&named, &k, &rels))?;
            ensure!(ok.iter().all(|b| *b), "q={q} n={n}: relation checks {ok:?}");
            let a: Vec<_> = named.generators.iter().map(|g| g.poly.clone()).collect();
            let b: Vec<_> = computed.generators.iter().map(|g| g.poly.clone()).collect();
            ensure!(
                invar::same_generated_lattices(&k, &a, &b, 2 * nn),
                "q={q} n={n}: A, B, C, B', C' do not generate the invariants"
            );
            let generic = lib(invar::fiber_type(FiberSubject::Embedding(&e), FiberPoint::Generic, n))?;
            ensure!(generic.rdp.family == RdpFamily::A && generic.rdp.index == n - 1, "generic fiber {:?}", generic.rdp);
            // (b): A, B, C with κ = d at primes not dividing d
            for (_, pr) in sample_primes(&k, |p| !divides(d)(p), 10) {
                let r = lib(invar::local_presentation(&named, &k, ["A", "B", "C"], FiberPoint::Prime(&pr)))?
                    .ok_or(format!("q={q} n={n}: A, B, C do not present the fiber at {pr}"))?;
                ensure!(r.kappa.as_deref() == Some(d.to_string().as_str()), "κ = {:?} at {pr}", r.kappa);
                let auto = lib(invar::fiber_from_presentation(&computed, &k, FiberPoint::Prime(&pr)))?;
                ensure!(auto.rdp.family == RdpFamily::A && auto.rdp.index == n - 1, "fiber at {pr}: {:?}", auto.rdp);
            }
            // (c): A, B', C' with κ = −q at primes not dividing q
            for (_, pr) in sample_primes(&k, |p| !divides(q)(p), 10) {
                let r = lib(invar::local_presentation(&named, &k, ["A", "B'", "C'"], FiberPoint::Prime(&pr)))?
                    .ok_or(format!("q={q} n={n}: A, B', C' do not present the fiber at {pr}"))?;
                ensure!(r.kappa.as_deref() == Some((-q).to_string().as_str()), "κ = {:?} at {pr}", r.kappa);
                let auto = lib(invar::fiber_from_presentation(&computed, &k, FiberPoint::Prime(&pr)))?;
                ensure!(auto.rdp.family == RdpFamily::A && auto.rdp.index == n - 1, "fiber at {pr}: {:?}", auto.rdp);
            }
            // the complementary primes need the other triple
            for (_, pr) in sample_primes(&k, divides(d), 1) {
                let r = lib(invar::local_presentation(&named, &k, ["A", "B", "C"], FiberPoint::Prime(&pr)))?;
                ensure!(r.is_none(), "A, B, C unexpectedly present the fiber at {pr} over d");
            }
            for (_, pr) in sample_primes(&k, divides(q), 1) {
                let r = lib(invar::local_presentation(&named, &k, ["A", "B'", "C'"], FiberPoint::Prime(&pr)))?;
                ensure!(r.is_none(), "A, B', C' unexpectedly present the fiber at {pr} over q");
            }
            let loc = lib(invar::localized_presentation(&e, &k.int(q)))?;
            ensure!(loc.generators.len() == 3, "localized at {q}: {} generators", loc.generators.len());
        }
        // (a): n even
        let n = 4;
        let e = lib(pat.embedding(n))?;
        let computed = lib(invar::algebra_generators(&e.rho, 8))?;
        ensure!(computed.degrees() == vec![2, 4, 4], "q={q} n=4: degrees {:?}", computed.degrees());
        let named = lib(pat.presentation(n))?;
        ensure!(named.relations.len() == 1, "q={q} n=4: A^n − VW fails");
        for (_, pr) in sample_primes(&k, |_| true, 10) {
            let r = lib(invar::local_presentation(&named, &k, ["A", "V", "W"], FiberPoint::Prime(&pr)))?
                .ok_or(format!("q={q} n=4: A, V, W do not present the fiber at {pr}"))?;
            ensure!(r.rdp.index == 3, "fiber at {pr}: {:?}", r.rdp);
        }
        let loc = lib(invar::localized_presentation(&e, &k.int(q)))?;
        ensure!(loc.generators.len() == 3, "n=4 localized: {} generators", loc.generators.len());
        notes.push(format!("q={q}"));
    }
    // further localizations
    let k10 = lib(make_field(10))?;
    let e10 = lib(ConjugatedEmbedding::new(lib(Mat2::parse(&k10, r#"[[3,"4+s"],["4-s",3]]"#))?, 4))?;
    ensure!(lib(invar::localized_presentation(&e10, &k10.int(3)))?.generators.len() == 3, "Q(√10) matrix over O_K[1/3]");
    let std3 = lib(ConjugatedEmbedding::new(Mat2::identity(&k10), 3))?;
    ensure!(lib(invar::localized_presentation(&std3, &k10.one()))?.generators.len() == 3, "standard over O_K");
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{}: 5 generators for n = 3, 5 with 8 relations, 3 for n = 4, fibers (a)-(c) at 10 primes each ({:.1?})",
        notes.join(", "),
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut count = 0;
    for disc in oracles::fundamental_discriminants(500) {
        let k = lib(make_field(oracles::d_of_disc(disc)))?;
        ensure!(k.disc() == disc, "disc of d = {} is {}", k.d(), k.disc());
        let (h_or, h1_or) = oracles::class_numbers_by_forms(disc);
        let h = lib(classfield::class_number(&k))?;
        let data = lib(classfield::ray_class_data(&k))?;
        let narrow = lib(classfield::narrow_class_group(&k))?;
        ensure!(h == h_or, "D = {disc}: h = {h}, forms give {h_or}");
        ensure!(narrow.order() == h1_or, "D = {disc}: |Cl¹| = {}, forms give {h1_or}", narrow.order());
        ensure!(data.h1 == h1_or && data.h == h, "D = {disc}: ray data {data:?}");
        ensure!(data.h1 == (1u64 << (data.r - data.t)) * data.h, "D = {disc}: h1 ≠ 2^(r−t)·h");
        count += 1;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{count} fundamental discriminants, h and h1 match the forms oracle ({:.1?})", start.elapsed()))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut total = 0;
    for disc in oracles::fundamental_discriminants(500) {
        let k = lib(make_field(oracles::d_of_disc(disc)))?;
        let narrow = lib(classfield::narrow_class_group(&k))?;
        let hom = 1usize << narrow.cyclic_orders.iter().filter(|o| *o % 2 == 0).count();
        let exts: Vec<UnramifiedQuadExt> = lib(classfield::unramified_quadratic_extensions(&k))?;
        ensure!(exts.len() + 1 == hom, "D = {disc}: {} extensions, |Hom(Cl¹, Z/2)| = {hom}", exts.len());
        for e in &exts {
            ensure!(lib(classfield::ramification_check(e))?, "D = {disc}: δ = {} ramifies", e.delta);
        }
        total += exts.len();
    }
    Ok(format!("{total} extensions listed, counts match 2-torsion of Cl¹ ({:.1?})", start.elapsed()))
}

// ---------------------------------------------------------------------------

fn criterion_5() -> Check {
    let mut fields = vec![QuadraticField::rationals()];
    for d in [-1, -2, -3, -7, -11] {
        fields.push(lib(make_field(d))?);
    }
    for k in &fields {
        for n in [3, 4, 5, 7] {
            let r = lib(klein::klein_report(k, n))?;
            ensure!(r.singleton, "d = {} n = {n} is not a singleton", r.d);
        }
    }
    let k10 = lib(make_field(10))?;
    let r = lib(klein::klein_report(&k10, 3))?;
    ensure!(!r.singleton && r.lower_bound == 2, "Q(√10): singleton {} lower bound {}", r.singleton, r.lower_bound);
    for d in [1, -1, -5, -23, 10, 15, 3, -42, -110, 5, 79] {
        let k = if d == 1 { QuadraticField::rationals() } else { lib(make_field(d))? };
        let base = lib(klein::klein_report(&k, 3))?;
        for n in [4, 5, 7] {
            ensure!(base.same_data(&lib(klein::klein_report(&k, n))?), "d = {d}: report for n = {n} differs");
        }
        ensure!(lib(klein::klein_report(&k, 2))?.singleton, "d = {d}: n = 2 is not a singleton");
    }
    Ok("h = 1 fields singleton, Q(√10) lower bound 2, n-independent, n = 2 singleton".into())
}

// ---------------------------------------------------------------------------

fn random_matrix(k: &QuadraticField, rng: &mut ChaCha8Rng) -> Mat2 {
    if rng.gen_bool(0.5) {
        let mut e = || k.ints(rng.gen_range(-4..=4), rng.gen_range(-4..=4));
        Mat2::new(e(), e(), e(), e())
    } else {
        let beta = k.ints(rng.gen_range(-8..=8), rng.gen_range(-8..=8));
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let a = k.int(rng.gen_range(-8..=8));
        let d = k.int(rng.gen_range(-8..=8));
        Mat2::new(a, beta.clone(), &beta.conj() * &k.int(sign), d)
    }
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c61_6d62_6461);
    let fields: Vec<QuadraticField> = [-1, -5, -6, -23, -31, 10, 15]
        .iter()
        .map(|d| make_field(*d))
        .collect::<quadklein::Result<_>>()
        .map_err(|e| e.to_string())?;
    for k in &fields {
        ensure!(lib(classfield::class_number(k))? <= 3, "h > 3 for d = {}", k.d());
    }
    let (mut tested, mut positive) = (0, 0);
    while tested < 200 {
        let k = &fields[rng.gen_range(0..fields.len())];
        let n = rng.gen_range(3..=5);
        let a = random_matrix(k, &mut rng);
        if a.det().is_zero() || a.entries().any(|x| x.height() > quadklein::arith::rat(8)) {
            continue;
        }
        let Ok(e) = ConjugatedEmbedding::new(a.clone(), n) else { continue };
        tested += 1;
        let verdict = lib(embed::is_conjugate_to_standard(&e))?;
        let brute = oracles::brute_force_conjugator(&e);
        ensure!(
            verdict.is_some() == brute.is_some(),
            "d = {} n = {n} A = {a}: criterion says {}, brute force says {}",
            k.d(),
            verdict.is_some(),
            brute.is_some()
        );
        if let Some(b) = verdict {
            ensure!(embed::verify_conjugator(&e.rho, &b), "conjugator {b} for {a} fails verification");
            positive += 1;
        }
    }
    Ok(format!("{tested} matrices, {positive} conjugate, all verdicts agree ({:.1?})", start.elapsed()))
}

// ---------------------------------------------------------------------------

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (d, delta) in [(-42, "-7"), (10, "5")] {
        let k = lib(make_field(d))?;
        let ext = lib(classfield::find_extension(&k, &lib(k.parse_element(delta))?))?;
        let r = lib(density::splitting_census(&k, &ext, 100_000))?;
        ensure!(r.counts.ramified == 0, "d = {d}: {} ramified primes", r.counts.ramified);
        let f = r.natural_density_split.to_f64().unwrap_or(f64::NAN);
        ensure!((0.48..=0.52).contains(&f), "d = {d}: split density {f:.4}");
        notes.push(format!("d={d}: {f:.4}"));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} ({:.1?})", notes.join(", "), start.elapsed()))
}

// ---------------------------------------------------------------------------

fn random_element(k: &QuadraticField, rng: &mut ChaCha8Rng) -> FieldElement {
    let mut r = || quadklein::arith::rat_frac(rng.gen_range(-20..=20), rng.gen_range(1..=6));
    k.elem(r(), r())
}

fn random_integral(k: &QuadraticField, rng: &mut ChaCha8Rng, h: i64) -> FieldElement {
    k.ints(rng.gen_range(-h..=h), rng.gen_range(-h..=h))
}

fn random_unimodular(k: &QuadraticField, rng: &mut ChaCha8Rng) -> Mat2 {
    let mut b = Mat2::identity(k);
    for _ in 0..3 {
        let t = random_integral(k, rng, 2);
        let el = if rng.gen_bool(0.5) {
            Mat2::new(k.one(), t, k.zero(), k.one())
        } else {
            Mat2::new(k.one(), k.zero(), t, k.one())
        };
        b = b.mul(&el);
    }
    b
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fields: Vec<QuadraticField> = [-1, -3, -5, -23, 2, 5, 10, 13]
        .iter()
        .map(|d| make_field(*d))
        .collect::<quadklein::Result<_>>()
        .map_err(|e| e.to_string())?;
    // field identities
    for _ in 0..400 {
        let k = &fields[rng.gen_range(0..fields.len())];
        let (x, y) = (random_element(k, &mut rng), random_element(k, &mut rng));
        ensure!((&x * &y).norm() == x.norm() * y.norm(), "N(xy) ≠ N(x)N(y) for {x}, {y}");
        ensure!((&x + &y).trace() == x.trace() + y.trace(), "trace not additive");
        ensure!(&x * &x.conj() == k.from_rational(x.norm()), "x·x̄ ≠ N(x)");
        ensure!(&x + &x.conj() == k.from_rational(x.trace()), "x + x̄ ≠ Tr(x)");
        ensure!(x.conj().conj() == x, "conjugation is not an involution");
    }
    // ideal laws
    for _ in 0..150 {
        let k = &fields[rng.gen_range(0..fields.len())];
        let mut gen_ideal = || -> quadklein::Result<FracIdeal> {
            let mut g = vec![random_integral(k, &mut rng, 6), random_integral(k, &mut rng, 6)];
            if g.iter().all(|x| x.is_zero()) {
                g.push(k.one());
            }
            ideal::ideal_from_generators(&g)
        };
        let (i, j, l) = (lib(gen_ideal())?, lib(gen_ideal())?, lib(gen_ideal())?);
        ensure!(i.mul(&j) == j.mul(&i), "IJ ≠ JI");
        ensure!(i.mul(&j).mul(&l) == i.mul(&j.mul(&l)), "(IJ)L ≠ I(JL)");
        ensure!(i.mul(&i.inv()).is_unit_ideal(), "I·I⁻¹ ≠ O_K for {i}");
        ensure!(i.mul(&j).norm() == i.norm() * j.norm(), "N(IJ) ≠ N(I)N(J)");
        ensure!(i.mul(&j).is_subset_of(&i), "IJ ⊄ I");
    }
    // invariant theory on a pool of embeddings
    let k42 = lib(make_field(-42))?;
    let k10 = lib(make_field(10))?;
    let k5 = lib(make_field(-5))?;
    let pool: Vec<(Mat2, usize)> = vec![
        (lib(NormPattern { q: 7, d: 6 }.matrix())?, 3),
        (lib(NormPattern { q: 7, d: 6 }.matrix())?, 4),
        (lib(Mat2::parse(&k10, r#"[[3,"4+s"],["4-s",3]]"#))?, 3),
        (lib(Mat2::parse(&k10, r#"[[3,"4+s"],["4-s",3]]"#))?, 4),
        (Mat2::identity(&k5), 3),
        (Mat2::diag(k5.int(5), k5.one()), 4),
        (Mat2::identity(&k42), 5),
    ];
    let mut noether = 0;
    for (a, n) in &pool {
        let k = a.field();
        let e = lib(ConjugatedEmbedding::new(a.clone(), *n))?;
        let bound = 2 * *n as u32;
        let pres = lib(invar::algebra_generators(&e.rho, bound))?;
        for g in &pres.generators {
            ensure!(invar::is_invariant(&g.poly, &e.rho), "{} is not invariant", g.name);
            ensure!(g.degree <= *n as u32, "generator of degree {} > n = {n}", g.degree);
        }
        noether += 1;
        for d in 0..=bound {
            ensure!(
                invar::invariant_dimension(&e.rho, d) == invar::expected_dimension(*n, d),
                "Hilbert count fails at degree {d} for n = {n}"
            );
        }
        // conjugation covariance
        for _ in 0..2 {
            let b = random_unimodular(&k, &mut rng);
            let binv = b.inv().ok_or("singular unimodular matrix")?;
            let moved: Vec<_> = pres.generators.iter().map(|g| g.poly.linear_substitute(&binv)).collect();
            let e2 = lib(ConjugatedEmbedding::new(b.mul(a), *n))?;
            let gen_lats = invar::generated_lattices(&k, &moved, bound);
            for d in 1..=bound {
                ensure!(
                    gen_lats[d as usize] == invar::invariant_lattice_of(&e2.rho, d),
                    "covariance fails at degree {d} for B = {b}"
                );
            }
        }
    }
    Ok(format!(
        "field identities, ideal laws, fixed points, covariance, Hilbert counts, Noether bound on {noether} actions ({:.1?})",
        start.elapsed()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("norm-3 obstruction over Q(√10)", criterion_1),
        ("invariants and fibers of [[q, s], [−s, q]]", criterion_2),
        ("class groups vs forms oracle", criterion_3),
        ("unramified quadratic extensions vs 2-torsion", criterion_4),
        ("Klein reports", criterion_5),
        ("conjugacy criterion vs brute force", criterion_6),
        ("splitting density", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
