//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use onerel::crash_simulator::{
    adversarial_schedule, default_schedules, simulate, standard_schedule, standard_schedule_ii,
    verify_at_least_two_crashes, CrashEvent, Site,
};
use onerel::klyachko_strata::{kernel_canonical_form, lemma2_decompose};
use onerel::rational::{frac, int};
use onerel::sphere_complex::{
    detect_type1, detect_type2, generate_random, parse_complex, read_face_word, Corner, Dir, Face, FaceType,
    RelatorSet, SphereComplex, Step,
};
use onerel::surjectivity_analyzer::{
    analyze, collapse_isomorphism, normal_closure_search, Reason, SearchBounds, Status,
};
use onerel::word_algebra::{
    conjugacy_canonical_with_conjugator, cyclic_reduce, exponent_sum, free_reduce, Letter, MixedWord, Sign, TShape,
};
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden(name: &str) -> SphereComplex {
    parse_complex(&std::fs::read_to_string(data_path(name)).expect("golden exists")).expect("golden parses")
}

fn word_oracles() -> Check {
    let letters = alphabet("ab").letters();
    let mut sequences = 0;
    for len in 0..=6 {
        for raw in all_sequences(&letters, len) {
            let got = free_reduce(&raw);
            ensure(got.letters() == naive_reduce(&raw).as_slice(), || format!("free_reduce {raw:?}"))?;
            sequences += 1;
        }
    }
    let conjugators = reduced_words(&letters, 4);
    let words = reduced_words(&letters, 6);
    for w in &words {
        let r = cyclic_reduce(w);
        ensure(oracle_cyclic_rotations(w.letters()).contains(&r.reduced.letters().to_vec()), || {
            format!("cyclic_reduce {w}")
        })?;
        ensure(oracle_is_cyclically_reduced(r.reduced.letters()), || format!("cyclic_reduce {w} -> {}", r.reduced))?;
        ensure(r.reduced.conjugate_by(&r.conjugator) == *w, || format!("cyclic conjugator {w}"))?;
        let (canonical, u) = conjugacy_canonical_with_conjugator(w);
        ensure(canonical.letters() == oracle_canonical(w, &conjugators).as_slice(), || format!("canonical {w}"))?;
        ensure(canonical.conjugate_by(&u) == *w, || format!("canonical conjugator {w}"))?;
    }
    Ok(format!("{sequences} sequences, {} reduced words", words.len()))
}

fn triangle_reading() -> Check {
    let got = read_face_word(&golden("labelled_triangle.json"), "tri", 0).map_err(|e| e.to_string())?.to_string();
    ensure(got == "taTbTc", || format!("read {got}"))?;
    Ok(got)
}

fn bounded_closure_check() -> Check {
    let started = Instant::now();
    let ab = alphabet("ab");
    let target = TShape::new(vec![1]).unwrap();
    let bounds = SearchBounds { conj_len: 3, products: 3 };
    let words = non_gt_exponent_one_words(&ab.letters(), 6);
    for w in &words {
        let found = normal_closure_search(w, &ab, &target, bounds).map_err(|e| e.to_string())?;
        ensure(found.is_none(), || format!("{w}: found {:?}", found.map(|f| f.element.to_string())))?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("{} words, {:.1}s", words.len(), elapsed.as_secs_f64()))
}

fn gt_conjugates() -> Check {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let all = alphabet("ab").letters();
    let base: Vec<Letter> = all.iter().copied().filter(|l| !l.is_stable()).collect();
    for _ in 0..100 {
        let u = MixedWord::from_letters((0..rng.gen_range(0..=5)).map(|_| all[rng.gen_range(0..all.len())]));
        let g = MixedWord::from_letters((0..rng.gen_range(0..=4)).map(|_| base[rng.gen_range(0..base.len())]));
        let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let w = MixedWord::product([&u, &g, &MixedWord::t_power(sign.as_i64()), &u.inverse()]);
        let v = analyze(&w, 2).map_err(|e| e.to_string())?;
        ensure(v.status == Status::Surjective, || format!("{w}: {:?}", v.status))?;
        let c = collapse_isomorphism(&w).map_err(|e| e.to_string())?;
        ensure(c.verified && oracle_substitute(&w, &c.t_image).is_empty(), || format!("{w}: collapse"))?;
    }
    Ok("100 conjugates".into())
}

fn decomposition_invariants() -> Check {
    let words = random_words_with_exponent(5, &alphabet("ab").letters(), 1, 8, 200);
    for w in &words {
        let d = lemma2_decompose(w).map_err(|e| format!("{w}: {e}"))?;
        check_decomposition(w, &d).map_err(|e| format!("{w}: {e}"))?;
    }
    Ok(format!("{} words", words.len()))
}

fn type_i_face(r: u32) -> Face {
    let mut dirs = Vec::new();
    for _ in 0..=r {
        dirs.extend([Dir::Against, Dir::With]);
    }
    dirs.push(Dir::With);
    Face {
        id: "w".into(),
        face_type: Some(FaceType::I),
        boundary: dirs.iter().map(|&dir| Step { edge: "e".into(), dir }).collect(),
        corners: dirs.iter().map(|_| Corner { vertex: "v".into(), label: None }).collect(),
    }
}

fn schedules_by_type() -> Check {
    for r in 1..=4u32 {
        let face = type_i_face(r);
        let n = face.len();
        let s = standard_schedule(&face, r).map_err(|e| e.to_string())?;
        let start = s.corner_at(&int(0)).ok_or("no start corner")?;
        for i in 0..=(2 * r as usize + 1) {
            ensure(s.corner_at(&int(i as i64)) == Some((start + i) % n), || format!("r={r}: corner at {i}"))?;
        }
        let c = (start + n - 1) % n;
        let mut t = int(2 * r as i64 + 2);
        while t <= int(4 * r as i64 + 1) {
            ensure(s.corner_at(&t) == Some(c), || format!("r={r}: not at c at {t}"))?;
            t += frac(1, 4);
        }
        ensure(s.period == int(4 * r as i64 + 2), || format!("r={r}: period {}", s.period))?;
    }
    let two_gon = golden("csl_passing.json");
    let ii = standard_schedule_ii(two_gon.face("fh").unwrap()).map_err(|e| e.to_string())?;
    ensure(ii.period == int(2), || format!("type II period {}", ii.period))?;
    Ok("r = 1..4 and type II".into())
}

fn at_least_two_crashes() -> Check {
    for seed in 0..100u64 {
        let c = generate_random(seed, 1 + (seed as usize % 6));
        let schedules = default_schedules(&c, seed).map_err(|e| e.to_string())?;
        let period = onerel::crash_simulator::common_period(&schedules);
        let check = verify_at_least_two_crashes(&c, &schedules, &(period * int(2))).map_err(|e| e.to_string())?;
        ensure(check.at_least_two, || format!("seed {seed}: {} complete crashes", check.complete_in_period))?;
    }
    Ok("100 complexes".into())
}

fn adversarial() -> Check {
    for seed in 0..20u64 {
        let c = generate_random(seed, 3);
        let inf = c.face(&c.distinguished.e_infinity).unwrap().clone();
        let loop_edge = inf.boundary[0].edge.clone();
        let b_face = c.faces.iter().find(|f| f.id != inf.id && f.boundary.iter().any(|s| s.edge == loop_edge)).unwrap();
        let mut schedules = default_schedules(&c, seed).map_err(|e| e.to_string())?;
        let b = schedules[&b_face.id].clone();
        let omega = frac(1 + seed as i64 % 7, 8);
        let setup = adversarial_schedule(&c, &b, omega).map_err(|e| format!("seed {seed}: {e}"))?;
        schedules.insert(inf.id.clone(), setup.schedule.clone());
        let events = simulate(&c, &schedules, &(b.period * int(10))).map_err(|e| e.to_string())?;
        let on_boundary = |e: &&CrashEvent| match &e.site {
            Site::Edge { edge, .. } => *edge == loop_edge,
            Site::Vertex { vertex } => *vertex == c.distinguished.v0,
        };
        let sites: BTreeSet<Site> =
            events.iter().filter(|e| e.complete).filter(on_boundary).map(|e| e.site.clone()).collect();
        let omega_site = Site::Edge { edge: loop_edge.clone(), coordinate: setup.omega_coordinate };
        ensure(sites == BTreeSet::from([omega_site]), || format!("seed {seed}: sites {sites:?}"))?;
        let at_v0 = Site::Vertex { vertex: c.distinguished.v0.clone() };
        ensure(!events.iter().any(|e| e.complete && e.site == at_v0), || format!("seed {seed}: crash at v0"))?;
    }
    Ok("20 complexes".into())
}

fn kernel_round_trip() -> Check {
    let mut count = 0;
    for w in reduced_words(&alphabet("a").letters(), 6) {
        if exponent_sum(&w) != 0 {
            continue;
        }
        let k = kernel_canonical_form(&w).map_err(|e| e.to_string())?;
        ensure(k.expand() == w, || format!("{w} -> {}", k.expand()))?;
        count += 1;
    }
    Ok(format!("{count} words"))
}

fn exponent_sum_verdicts() -> Check {
    let mut count = 0;
    for w in reduced_words(&alphabet("ab").letters(), 6).into_iter().filter(|w| !w.is_empty()) {
        if exponent_sum(&w).abs() == 1 {
            continue;
        }
        let v = analyze(&w, 2).map_err(|e| e.to_string())?;
        ensure((v.status, v.reason) == (Status::NotSurjective, Reason::ExponentSum), || format!("{w}: {v:?}"))?;
        count += 1;
    }
    Ok(format!("{count} words"))
}

fn reducibility_detectors() -> Check {
    let t = RelatorSet::new(word("t"));
    let chain = detect_type2(&golden("trivial_chain.json"), &t).map_err(|e| e.to_string())?;
    ensure(chain.as_ref().is_some_and(|w| w.faces.len() == 3), || format!("trivial chain: {chain:?}"))?;
    let relators = fixture_relators();
    let pair = detect_type1(&golden("mirrored.json"), &relators).map_err(|e| e.to_string())?;
    ensure(pair.is_some(), || "mirrored pair: no type (1) witness".into())?;
    for name in ["csl_passing.json", "tetrahedron.json", "free_chain.json", "bigon.json"] {
        let c = golden(name);
        let one = detect_type1(&c, &relators).map_err(|e| e.to_string())?;
        let two = detect_type2(&c, &relators).map_err(|e| e.to_string())?;
        ensure(one.is_none() && two.is_none(), || format!("{name}: {one:?} {two:?}"))?;
    }
    Ok("chain, pair and 4 clean goldens".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("word algebra oracles", word_oracles),
        ("triangle face reading", triangle_reading),
        ("no (+1) element in bounded normal closures", bounded_closure_check),
        ("g t conjugates collapse", gt_conjugates),
        ("block decomposition invariants", decomposition_invariants),
        ("car schedules", schedules_by_type),
        ("at least two crashes", at_least_two_crashes),
        ("adversarial car meets only at omega", adversarial),
        ("kernel form round trip", kernel_round_trip),
        ("exponent sum verdicts", exponent_sum_verdicts),
        ("reducibility detectors", reducibility_detectors),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
