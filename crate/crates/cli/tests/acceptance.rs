//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cnalg_core::alt::Alternating;
use cnalg_core::bundle::{check_courant_axioms, make_sl2, make_standard_tm, make_twisted_tm};
use cnalg_core::cartan::{coord_field, nijenhuis_torsion, Bivector, EndoTM, SymBilinear};
use cnalg_core::compat::{
    bfield_conjugate, check_cn, check_dual_im, check_h_r_compatible, check_im, kahler_gauge_form,
    lagrangian_invariance, LagrangianFrame,
};
use cnalg_core::deriv::{
    check_nijenhuis, make_lift, make_metric_derivation, LiftKind, NijenhuisMode, OneDerivation,
};
use cnalg_core::linalg::{is_zero_vec, Matrix};
use cnalg_core::report::{CheckReport, Status};
use cnalg_core::sample::{Sampler, DEFAULT_SEED};
use cnalg_core::split::{
    check_manin, induced_bivector_identity, PreLieAlgebroidData, ProtoBialgebroidData,
};
use cnalg_field::{Chart, RatFunc};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn plane() -> Chart {
    Chart::new(&["x", "y"]).unwrap()
}

fn space() -> Chart {
    Chart::new(&["x", "y", "z"]).unwrap()
}

fn mat(c: &Chart, rows: &[&[&str]]) -> Matrix {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|s| c.parse(s).unwrap()).collect())
            .collect(),
    )
}

fn rot(c: &Chart) -> EndoTM {
    EndoTM(mat(c, &[&["0", "-1"], &["1", "0"]]))
}

/// k dx∧dy∧dz on ℝ³.
fn vol(k: i64) -> Alternating {
    Alternating::from_fn(3, 3, |_| RatFunc::from_int(k))
}

fn require(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn first_failure(r: &CheckReport) -> String {
    match r.first_failure() {
        Some(e) => match &e.witness {
            Some(w) => format!("{} failed: {} at {}", e.id, w.expr, w.at),
            None => format!("{} failed", e.id),
        },
        None => "no failing entry".into(),
    }
}

fn courant_axioms() -> Outcome {
    let c = space();
    for k in [0, 1] {
        let e = make_twisted_tm(&c, &vol(k)).map_err(|e| e.to_string())?;
        let r = check_courant_axioms(&e, DEFAULT_SEED);
        require(r.passed(), || {
            format!("twisted c={k}: {}", first_failure(&r))
        })?;
    }
    let r = check_courant_axioms(&make_sl2(&plane()), DEFAULT_SEED);
    require(r.passed(), || format!("sl2: {}", first_failure(&r)))?;
    Ok("twisted c=0, c=1 and sl2 satisfy C1-C5".into())
}

fn lifts_on_plane() -> Outcome {
    let c = plane();
    let e = make_standard_tm(&c);
    let mut rs = vec![
        ("id", EndoTM::identity(2)),
        ("r_rot", rot(&c)),
        (
            "[[y,0],[0,0]]",
            EndoTM(mat(&c, &[&["y", "0"], &["0", "0"]])),
        ),
    ];
    let names: Vec<String> = (1..=5).map(|s| format!("random seed {s}")).collect();
    for (seed, name) in (1..=5u64).zip(&names) {
        rs.push((name.as_str(), EndoTM(Sampler::new(seed, 2).matrix(2, 2))));
    }
    let mut nijenhuis = 0;
    for (name, r) in &rs {
        let d = make_lift(&c, r, LiftKind::Generalized).map_err(|e| e.to_string())?;
        let cn = check_cn(&e, &d, DEFAULT_SEED);
        require(cn.passed(), || format!("{name}: {}", first_failure(&cn)))?;
        let torsion_free = is_zero_vec(&nijenhuis_torsion(
            r,
            &coord_field(2, 0),
            &coord_field(2, 1),
        ));
        let nij = check_nijenhuis(&d, NijenhuisMode::Nijenhuis, DEFAULT_SEED).passed();
        require(nij == torsion_free, || {
            format!("{name}: N_r = 0 is {torsion_free} but the Nijenhuis check says {nij}")
        })?;
        nijenhuis += usize::from(nij);
    }
    Ok(format!(
        "{} lifts are CN; Nijenhuis verdict matches N_r = 0 on all ({nijenhuis} Nijenhuis)",
        rs.len()
    ))
}

fn twisted_compatibility() -> Outcome {
    let c = space();
    let h = vol(1);
    let e = make_twisted_tm(&c, &h).map_err(|e| e.to_string())?;
    let rs = [
        ("id", EndoTM::identity(3)),
        (
            "2 id",
            EndoTM(Matrix::identity(3).scale(&RatFunc::from_int(2))),
        ),
        (
            "-3 id",
            EndoTM(Matrix::identity(3).scale(&RatFunc::from_int(-3))),
        ),
        (
            "diag(1,1,0)",
            EndoTM(mat(
                &c,
                &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "0"]],
            )),
        ),
    ];
    let mut verdicts = Vec::new();
    for (name, r) in &rs {
        let d = make_lift(&c, r, LiftKind::Generalized).map_err(|e| e.to_string())?;
        let cn = check_cn(&e, &d, DEFAULT_SEED).passed();
        let hr = check_h_r_compatible(&c, &h, r).passed();
        require(cn == hr, || {
            format!("{name}: CN {cn} but H_r-compatible {hr}")
        })?;
        verdicts.push(format!("{name} {}", if cn { "pass" } else { "fail" }));
    }
    require(verdicts.last().is_some_and(|v| v.ends_with("fail")), || {
        "diag(1,1,0) was expected to fail both".into()
    })?;
    Ok(format!("CN = H_r-compatible: {}", verdicts.join(", ")))
}

fn metric_derivations() -> Outcome {
    let c = plane();
    let e = make_standard_tm(&c);
    for (name, g) in [
        ("id", Matrix::identity(2)),
        ("diag(1+x^2,1)", mat(&c, &[&["1 + x^2", "0"], &["0", "1"]])),
    ] {
        let g = SymBilinear::new(g, 2).map_err(|e| e.to_string())?;
        let d = make_metric_derivation(&c, None, &g).map_err(|e| e.to_string())?;
        let r = check_cn(&e, &d, DEFAULT_SEED);
        require(r.passed(), || {
            format!("D^g, g = {name}: {}", first_failure(&r))
        })?;
    }
    let eh = make_twisted_tm(&c, &Alternating::zero(2, 3)).map_err(|e| e.to_string())?;
    let g = SymBilinear::new(Matrix::identity(2), 2).unwrap();
    let d = make_metric_derivation(&c, Some(&rot(&c)), &g).map_err(|e| e.to_string())?;
    let r = check_cn(&eh, &d, DEFAULT_SEED);
    require(r.passed(), || {
        format!("D^(r_rot, id): {}", first_failure(&r))
    })?;
    Ok("D^g for g = id, diag(1+x^2,1) and D^(r_rot,id) on E_0 are CN".into())
}

fn pseudo_kahler() -> Outcome {
    let c = plane();
    let id = SymBilinear::new(Matrix::identity(2), 2).unwrap();
    let d = make_metric_derivation(&c, Some(&rot(&c)), &id).map_err(|e| e.to_string())?;
    let r = check_nijenhuis(&d, NijenhuisMode::Dolbeault, DEFAULT_SEED);
    require(r.passed(), || format!("dolbeault: {}", first_failure(&r)))?;
    let g2 = SymBilinear::new(mat(&c, &[&["1", "0"], &["0", "2"]]), 2).unwrap();
    let d2 = make_metric_derivation(&c, Some(&rot(&c)), &g2).map_err(|e| e.to_string())?;
    let r2 = check_nijenhuis(&d2, NijenhuisMode::AlmostComplex, DEFAULT_SEED);
    let entry = r2
        .entry("D_rX + l∘D_X")
        .ok_or("almost complex entry missing")?;
    let w = match (&entry.status, &entry.witness) {
        (Status::Fail, Some(w)) => w,
        _ => {
            return Err("non-hermitian g = diag(1,2) did not fail the almost complex entry".into())
        }
    };
    Ok(format!(
        "dolbeault passes for g = id; g = diag(1,2) fails with {} at {}",
        w.expr, w.at
    ))
}

fn gauge() -> Outcome {
    let c = plane();
    let r = rot(&c);
    let id = Matrix::identity(2);
    let g = SymBilinear::new(id.clone(), 2).unwrap();
    let drg = make_metric_derivation(&c, Some(&r), &g).map_err(|e| e.to_string())?;
    let dr = make_lift(&c, &r, LiftKind::Generalized).map_err(|e| e.to_string())?;
    let b = kahler_gauge_form(&r, &id);
    let conj = bfield_conjugate(&drg, &b).map_err(|e| e.to_string())?;
    if let Some(w) = conj.difference(&dr) {
        return Err(format!(
            "tau_(omega/2) D^(r,g) differs from D^r: {} at {}",
            w.expr, w.at
        ));
    }
    let e = make_standard_tm(&c);
    let subjects: Vec<(&str, OneDerivation)> = vec![
        ("D^r_rot", dr),
        ("D^(r_rot,id)", drg),
        (
            "D^[[y,0],[0,0]]",
            make_lift(
                &c,
                &EndoTM(mat(&c, &[&["y", "0"], &["0", "0"]])),
                LiftKind::Generalized,
            )
            .unwrap(),
        ),
    ];
    let mut s = Sampler::new(DEFAULT_SEED, 2);
    for k in 0..3 {
        // every 2-form on the plane is closed
        let b = Alternating::from_fn(2, 2, |_| s.poly());
        for (name, d) in &subjects {
            let conj = bfield_conjugate(d, &b).map_err(|e| e.to_string())?;
            let pairs = [
                (
                    "CN",
                    check_cn(&e, d, DEFAULT_SEED).passed(),
                    check_cn(&e, &conj, DEFAULT_SEED).passed(),
                ),
                (
                    "Nijenhuis",
                    check_nijenhuis(d, NijenhuisMode::Nijenhuis, DEFAULT_SEED).passed(),
                    check_nijenhuis(&conj, NijenhuisMode::Nijenhuis, DEFAULT_SEED).passed(),
                ),
                (
                    "almost complex",
                    check_nijenhuis(d, NijenhuisMode::AlmostComplex, DEFAULT_SEED).passed(),
                    check_nijenhuis(&conj, NijenhuisMode::AlmostComplex, DEFAULT_SEED).passed(),
                ),
            ];
            for (what, before, after) in pairs {
                require(before == after, || {
                    format!("B #{k}, {name}: {what} {before} -> {after}")
                })?;
            }
        }
    }
    Ok(
        "tau_(omega/2) D^(r_rot,id) = D^r_rot; CN/Nijenhuis verdicts stable under 3 random B"
            .into(),
    )
}

fn lagrangians() -> Outcome {
    let c = plane();
    let e = make_standard_tm(&c);
    let pi = Bivector::new(mat(&c, &[&["0", "2"], &["-2", "0"]]), 2).unwrap();
    let b = Alternating::from_fn(2, 2, |_| RatFunc::from_int(-1));
    let fixtures = [
        (
            "graph 0",
            LagrangianFrame::graph_bivector(&Bivector::zero(2)),
        ),
        ("graph pi", LagrangianFrame::graph_bivector(&pi)),
        (
            "graph B",
            LagrangianFrame::graph_2form(&b).map_err(|e| e.to_string())?,
        ),
        ("TM", LagrangianFrame::tangent(2)),
        ("T*M", LagrangianFrame::cotangent(2)),
        ("mixed", LagrangianFrame::mixed(2, &[1])),
    ];
    let g = SymBilinear::new(Matrix::identity(2), 2).unwrap();
    let dg = make_metric_derivation(&c, None, &g).map_err(|e| e.to_string())?;
    let mut s = Sampler::new(DEFAULT_SEED, 2);
    let derivations = [
        ("D^g", dg.clone()),
        (
            "D^r_rot",
            make_lift(&c, &rot(&c), LiftKind::Generalized).unwrap(),
        ),
        (
            "D^(random r)",
            make_lift(&c, &EndoTM(s.matrix(2, 2)), LiftKind::Generalized).unwrap(),
        ),
    ];
    let mut invariant = 0;
    for (dname, d) in &derivations {
        for (lname, lag) in &fixtures {
            let (rep, _) = lagrangian_invariance(&e, d, lag).map_err(|e| e.to_string())?;
            let agree = rep
                .entry("criterion = direct invariance")
                .is_some_and(|e| e.passed());
            require(agree, || {
                format!("{dname} on {lname}: {}", rep.render_text())
            })?;
            invariant += usize::from(rep.passed());
        }
    }
    for k in [-1, 3, 7] {
        let b = Alternating::from_fn(2, 2, |_| RatFunc::from_int(k));
        let (rep, _) = lagrangian_invariance(&e, &dg, &LagrangianFrame::graph_2form(&b).unwrap())
            .map_err(|e| e.to_string())?;
        let s_l = rep.entry("S_L = 0").ok_or("S_L entry missing")?;
        require(s_l.status == Status::Fail, || {
            format!("graph of {k} dx^dy has S_L = 0 under D^g")
        })?;
    }
    Ok(format!(
        "(S_L, C_L) = direct invariance on 6 fixtures x 3 derivations ({invariant} invariant); graph of constant B fails S_L under D^g"
    ))
}

fn dual_im() -> Outcome {
    let c = plane();
    let tm = PreLieAlgebroidData::tangent(&c);
    let mut cases: Vec<(String, PreLieAlgebroidData, OneDerivation)> = Vec::new();
    for (name, r) in [
        ("r_rot", rot(&c)),
        (
            "[[y,0],[0,0]]",
            EndoTM(mat(&c, &[&["y", "0"], &["0", "0"]])),
        ),
        (
            "[[x*y,x],[1,y^2]]",
            EndoTM(mat(&c, &[&["x*y", "x"], &["1", "y^2"]])),
        ),
    ] {
        cases.push((
            format!("TM, {name}"),
            tm.clone(),
            make_lift(&c, &r, LiftKind::Tangent).unwrap(),
        ));
    }
    let labels = vec!["e1".to_string(), "e2".to_string()];
    let ab = PreLieAlgebroidData::abelian(&c, labels.clone());
    let flat = OneDerivation::new(
        c.clone(),
        EndoTM::zero(2),
        Matrix::identity(2),
        vec![Matrix::zeros(2, 2); 2],
        labels,
    )
    .unwrap();
    cases.push(("abelian rank 2".into(), ab, flat));
    cases.push((
        "TM, l = 0 (not IM)".into(),
        tm.clone(),
        OneDerivation::new(
            c.clone(),
            EndoTM::identity(2),
            Matrix::zeros(2, 2),
            vec![Matrix::zeros(2, 2); 2],
            tm.labels().to_vec(),
        )
        .unwrap(),
    ));
    let mut summary = Vec::new();
    for (name, a, d) in &cases {
        let im = check_im(a, d, DEFAULT_SEED).passed();
        let dual = check_dual_im(a, d, &[0, 1, 2], DEFAULT_SEED);
        require(dual.passed() == im, || {
            format!("{name}: IM {im} but dual IM {}", dual.passed())
        })?;
        let agrees = dual.entry("agrees_with_IM").is_some_and(|e| e.passed());
        require(agrees, || format!("{name}: agrees_with_IM entry failed"))?;
        summary.push(format!("{name} {}", if im { "pass" } else { "fail" }));
    }
    Ok(format!("dual IM (m = 0,1,2) = IM: {}", summary.join(", ")))
}

fn manin() -> Outcome {
    let c = plane();
    let e = make_standard_tm(&c);
    let mut cases = Vec::new();
    for (name, r) in [
        ("r_rot", rot(&c)),
        (
            "[[y,0],[0,0]]",
            EndoTM(mat(&c, &[&["y", "0"], &["0", "0"]])),
        ),
        (
            "[[x,y],[0,x*y]]",
            EndoTM(mat(&c, &[&["x", "y"], &["0", "x*y"]])),
        ),
    ] {
        cases.push((
            format!("plane {name}"),
            e.clone(),
            make_lift(&c, &r, LiftKind::Generalized).unwrap(),
            2,
            None,
        ));
    }
    let s = space();
    let eh = make_twisted_tm(&s, &vol(1)).map_err(|e| e.to_string())?;
    cases.push((
        "E_H id".into(),
        eh.clone(),
        make_lift(&s, &EndoTM::identity(3), LiftKind::Generalized).unwrap(),
        3,
        Some("left pass, right pass"),
    ));
    let diag = EndoTM(mat(
        &s,
        &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "0"]],
    ));
    cases.push((
        "E_H diag(1,1,0)".into(),
        eh,
        make_lift(&s, &diag, LiftKind::Generalized).unwrap(),
        3,
        Some("left fail, right fail"),
    ));
    let mut summary = Vec::new();
    for (name, e, d, n, expect) in &cases {
        let rep = check_manin(
            e,
            &LagrangianFrame::tangent(*n),
            &LagrangianFrame::cotangent(*n),
            d,
            DEFAULT_SEED,
        )
        .map_err(|err| format!("{name}: {err}"))?;
        let lr = rep
            .entry("left = right")
            .ok_or("left = right entry missing")?;
        require(lr.passed(), || format!("{name}: {}", first_failure(&rep)))?;
        let nij = rep
            .entry("nijenhuis(𝔻) = nijenhuis(𝒟)")
            .ok_or("nijenhuis entry missing")?;
        require(nij.passed(), || {
            format!("{name}: Nijenhuis verdicts differ")
        })?;
        let note = lr.note.clone().unwrap_or_default();
        if let Some(expect) = expect {
            require(note == *expect, || {
                format!("{name}: expected {expect}, got {note}")
            })?;
        }
        summary.push(format!("{name} ({note})"));
    }
    Ok(format!(
        "LEFT = RIGHT and Nijenhuis agree: {}",
        summary.join("; ")
    ))
}

fn bivector_identity() -> Outcome {
    let c = plane();
    let s = space();
    let standard =
        ProtoBialgebroidData::standard(&c, Alternating::zero(2, 3)).map_err(|e| e.to_string())?;
    let pi = Bivector::new(mat(&c, &[&["0", "3"], &["-3", "0"]]), 2).unwrap();
    let e = make_standard_tm(&c);
    let poisson = cnalg_core::split::extract_proto(
        &e,
        &LagrangianFrame::tangent(2),
        &LagrangianFrame::graph_bivector(&pi),
    )
    .map_err(|e| e.to_string())?;
    let twisted = ProtoBialgebroidData::standard(&s, vol(1)).map_err(|e| e.to_string())?;
    for (name, proto, expect_zero) in [
        ("standard", &standard, true),
        ("constant Poisson", &poisson, false),
        ("H-twisted", &twisted, true),
    ] {
        let (bv, rep) = induced_bivector_identity(proto);
        require(rep.passed(), || format!("{name}: {}", first_failure(&rep)))?;
        let bv = bv.ok_or_else(|| format!("{name}: no bivector"))?;
        require(bv.matrix().is_zero() == expect_zero, || {
            format!("{name}: unexpected induced bivector")
        })?;
        if name == "constant Poisson" {
            require(bv == pi, || {
                "constant Poisson: induced bivector is not pi".into()
            })?;
        }
    }
    Ok("standard (pi = 0), constant Poisson (pi recovered) and H-twisted quasi-triple pass".into())
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

/// JSON output and exit status per scenario.
type SuiteRun = Vec<(Vec<u8>, Option<i32>)>;

fn run_suite(files: &[PathBuf]) -> Result<SuiteRun, String> {
    files
        .iter()
        .map(|f| {
            let out = Command::new(env!("CARGO_BIN_EXE_cnalg"))
                .args(["check", "--format", "json"])
                .arg(f)
                .output()
                .map_err(|e| e.to_string())?;
            Ok((out.stdout, out.status.code()))
        })
        .collect()
}

fn determinism() -> Outcome {
    let mut files: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    require(files.len() >= 12, || {
        format!("only {} scenarios shipped", files.len())
    })?;
    let start = Instant::now();
    let first = run_suite(&files)?;
    let second = run_suite(&files)?;
    let elapsed = start.elapsed();
    for ((f, a), b) in files.iter().zip(&first).zip(&second) {
        let name = f.file_name().unwrap().to_string_lossy();
        require(a.0 == b.0, || format!("{name}: JSON differs between runs"))?;
        require(a.1 == b.1, || {
            format!("{name}: exit status differs between runs")
        })?;
        require(matches!(a.1, Some(0) | Some(1)), || {
            format!("{name}: exit status {:?}", a.1)
        })?;
    }
    require(elapsed <= Duration::from_secs(300), || {
        format!("suite took {elapsed:.1?}")
    })?;
    Ok(format!(
        "{} scenarios, bit-identical JSON across two runs, {:.1?} total",
        files.len(),
        elapsed
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("Courant axioms", courant_axioms),
        ("generalized lifts", lifts_on_plane),
        ("twisted compatibility", twisted_compatibility),
        ("metric derivations", metric_derivations),
        ("pseudo-Kahler", pseudo_kahler),
        ("gauge equivalence", gauge),
        ("lagrangian concomitants", lagrangians),
        ("dual IM", dual_im),
        ("Manin triples", manin),
        ("induced bivector", bivector_identity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({t:.1?}): {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({t:.1?}): {reason}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
