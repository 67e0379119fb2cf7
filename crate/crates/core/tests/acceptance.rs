//! Acceptance suite. Each check prints one PASS/FAIL line with its runtime
//! and limit; the process exits non-zero if any check fails.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use multisec_core::cone::RationalCone;
use multisec_core::geometry::{build_blowup_p2_point, build_product, build_projective};
use multisec_core::hilbert::{
    bruteforce_product_dim, bruteforce_vanishing_dim, check_shift, hilbert, vanishing_closed_form,
    verify_free_shift,
};
use multisec_core::lattice::{push_to_quotient, quotient, snf, IntMatrix};
use multisec_core::multisection::HeightClass;
use multisec_core::verify::{grid_cases, sweep_grid};
use multisec_core::{
    DegreeWindow, DivisorClass, Exec, Marker, MultiSectionSetup, Ring, ShiftVerdict, USet,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn dc(v: &[i64]) -> DivisorClass {
    DivisorClass(v.to_vec())
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn gorenstein_grid() -> Check {
    let outcomes = sweep_grid(Exec::default()).map_err(err)?;
    ensure!(outcomes.len() == grid_cases().len(), "sweep dropped cases");
    for o in &outcomes {
        let c = o.case;
        let closed = c.m as i64 + 1 == c.a + c.c && c.n as i64 + 1 == c.b + c.d;
        ensure!(
            o.free_t == closed,
            "{c:?}: free_t = {}, closed form {closed}",
            o.free_t
        );
    }
    let free = outcomes.iter().filter(|o| o.free_t).count();
    Ok(format!("{} cases exact, {free} Gorenstein", outcomes.len()))
}

fn veronese() -> Check {
    let mut count = 0;
    for n in 1..=6u32 {
        for d in 1..=6i64 {
            let setup = MultiSectionSetup::new(build_projective(n).map_err(err)?, vec![dc(&[d])])
                .map_err(err)?;
            let group = setup.class_group(Ring::T).map_err(err)?;
            let expected: Vec<BigInt> = if d == 1 { vec![] } else { vec![d.into()] };
            ensure!(
                group.free_rank == 0 && group.invariant_factors == expected,
                "P^{n}, D = {d}H: Cl(T) = {group}"
            );
            let canon = setup.canonical_report(Ring::T).map_err(err)?;
            let np1 = n as i64 + 1;
            ensure!(
                canon.free == (np1 % d == 0),
                "P^{n}, D = {d}H: free = {}",
                canon.free
            );
            if canon.free {
                ensure!(
                    canon.shift == Some(big(&[-np1 / d])),
                    "P^{n}, D = {d}H: shift {:?}",
                    canon.shift
                );
            }
            count += 1;
        }
    }
    Ok(format!("{count} cases exact"))
}

fn fano_grid() -> Check {
    let outcomes = sweep_grid(Exec::default()).map_err(err)?;
    for o in &outcomes {
        let c = o.case;
        ensure!(o.u_is_full, "{c:?}: U is not {{1, 2}}");
        ensure!(o.cl_t_is_z2, "{c:?}: Cl(T) is not Z^2");
        let anticanonical = c.a + c.c == c.m as i64 + 1 && c.b + c.d == c.n as i64 + 1;
        ensure!(o.free_t == anticanonical, "{c:?}: free_t = {}", o.free_t);
    }
    Ok(format!("{} cases exact", outcomes.len()))
}

fn blowup_setup() -> MultiSectionSetup {
    MultiSectionSetup::new(build_blowup_p2_point(), vec![dc(&[-1, 0]), dc(&[0, 1])]).unwrap()
}

fn blowup_facts() -> Check {
    let setup = blowup_setup();
    ensure!(
        setup.check_hypothesis_t() && setup.check_hypothesis_r(),
        "hypotheses fail"
    );
    let u = setup.compute_u().map_err(err)?;
    ensure!(u.members() == [1], "U = {u}");
    let cl_t = setup.class_group_given(Ring::T, &u);
    ensure!(
        cl_t.free_rank == 1 && cl_t.invariant_factors.is_empty(),
        "Cl(T) = {cl_t}"
    );
    let cl_r = setup.class_group(Ring::R).map_err(err)?;
    ensure!(cl_r.is_trivial(), "Cl(R) = {cl_r}");
    for ring in [Ring::T, Ring::R] {
        let canon = setup.canonical_report_given(ring, &u).map_err(err)?;
        ensure!(canon.free, "omega_{ring} not free");
        ensure!(
            canon.shift == Some(big(&[-1, -3])),
            "omega_{ring} shift {:?}",
            canon.shift
        );
    }
    let h = setup.height_report_given(&u);
    ensure!(
        h.0 == [HeightClass::ExactlyOne, HeightClass::AtLeastTwo],
        "heights {:?}",
        h.0
    );
    Ok("U = {1}, Cl(T) = Z, Cl(R) = 0, shift (-1, -3), heights (= 1, >= 2)".into())
}

/// Sections of `eE + aA` on the blown-up plane through the derivative-rank
/// count, without the geometry module.
fn blowup_dim_by_derivatives(e: i64, a: i64) -> Result<u64, String> {
    if a < 0 {
        return Ok(0);
    }
    let order = if e >= 0 { 0 } else { (-e) as u64 };
    bruteforce_vanishing_dim(a as u64, order).map_err(err)
}

fn independent_dim(
    setup: &MultiSectionSetup,
    marker: Marker,
    u: &USet,
    n: &[i64],
) -> Result<u64, String> {
    if !marker.admits(u, n) {
        return Ok(0);
    }
    // D_1 = -E, D_2 = A, K = E - 3A
    let (mut e, mut a) = (-n[0], n[1]);
    if matches!(marker, Marker::OmegaT | Marker::OmegaR) {
        let k = setup.variety.canonical_class.coords();
        e += k[0];
        a += k[1];
    }
    blowup_dim_by_derivatives(e, a)
}

fn table_matches_oracle(
    setup: &MultiSectionSetup,
    marker: Marker,
    window: &DegreeWindow,
) -> Result<usize, String> {
    let table = hilbert(setup, marker, window).map_err(err)?;
    for (n, d) in &table.entries {
        let want = independent_dim(setup, marker, &window.u_set, n)?;
        ensure!(
            *d == want,
            "{marker} at {n:?}: table {d}, derivative rank {want}"
        );
    }
    Ok(table.entries.len())
}

fn hilbert_verification() -> Check {
    let setup = blowup_setup();
    let u = setup.compute_u().map_err(err)?;
    let shift = [-1i64, -3];
    let mut compared = 0;
    let mut rejected = 0;
    for (ring, lo, hi) in [(Ring::T, [1, -2], [6, 8]), (Ring::R, [-4, -4], [6, 6])] {
        let window = DegreeWindow::new(u.clone(), lo.to_vec(), hi.to_vec()).map_err(err)?;
        let canon = setup.canonical_report_given(ring, &u).map_err(err)?;
        let verdict = verify_free_shift(&setup, &canon, &window).map_err(err)?;
        ensure!(verdict.passed(), "omega_{ring}: {verdict:?}");

        // every dimension used above, recomputed independently
        compared += table_matches_oracle(&setup, Marker::canonical_of(ring), &window)?;
        let shifted_lo: Vec<i64> = lo.iter().zip(shift).map(|(l, v)| l + v).collect();
        let shifted_hi: Vec<i64> = hi.iter().zip(shift).map(|(h, v)| h + v).collect();
        let shifted = DegreeWindow::new(u.clone(), shifted_lo, shifted_hi).map_err(err)?;
        compared += table_matches_oracle(&setup, Marker::of_ring(ring), &shifted)?;

        for i in 0..2 {
            for delta in [-1, 1] {
                let mut bad = shift;
                bad[i] += delta;
                let verdict =
                    check_shift(&setup, ring, &bad, &window, Exec::default()).map_err(err)?;
                let ShiftVerdict::Fail {
                    degree,
                    omega_dim,
                    ring_dim,
                } = verdict
                else {
                    return Err(format!("{ring}: perturbed shift {bad:?} passed"));
                };
                let moved: Vec<i64> = degree.iter().zip(bad).map(|(n, v)| n + v).collect();
                let w_omega = independent_dim(&setup, Marker::canonical_of(ring), &u, &degree)?;
                let w_ring = independent_dim(&setup, Marker::of_ring(ring), &u, &moved)?;
                ensure!(
                    omega_dim == w_omega && ring_dim == w_ring && w_omega != w_ring,
                    "{ring}: witness {degree:?} for {bad:?} does not reproduce"
                );
                rejected += 1;
            }
        }
    }
    Ok(format!(
        "{compared} dimensions cross-checked, {rejected} perturbations rejected with witnesses"
    ))
}

fn oracle_equivalence() -> Check {
    let mut count = 0;
    for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 3)] {
        let x = build_product(m, n).map_err(err)?;
        for p in 0..=8i64 {
            for q in 0..=8i64 {
                let got = x.h0(&dc(&[p, q])).map_err(err)?;
                let want = bruteforce_product_dim(m, n, p as u64, q as u64).map_err(err)?;
                ensure!(
                    got == want,
                    "P^{m} x P^{n} ({p}, {q}): oracle {got}, enumeration {want}"
                );
                count += 1;
            }
        }
    }
    let x = build_blowup_p2_point();
    for n2 in 0..=8i64 {
        for n1 in 0..=n2 {
            let got = x.h0(&dc(&[-n1, n2])).map_err(err)?;
            let want = vanishing_closed_form(n1 as u64, n2 as u64).map_err(err)?;
            ensure!(
                got == want,
                "blowup (-{n1}, {n2}): oracle {got}, closed form {want}"
            );
            count += 1;
        }
    }
    Ok(format!("{count} dimensions agree"))
}

fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    IntMatrix::from_rows(cols, &data)
}

fn snf_invariants(rng: &mut StdRng) -> Result<usize, String> {
    for trial in 0..100 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a = random_matrix(rng, r, c, 20);
        let s = snf(&a);
        ensure!(
            s.left.mul(&a).mul(&s.right) == s.diagonal_matrix(),
            "trial {trial}: left*A*right not diagonal"
        );
        ensure!(
            s.left.det().abs().is_one(),
            "trial {trial}: left not unimodular"
        );
        ensure!(
            s.right.det().abs().is_one(),
            "trial {trial}: right not unimodular"
        );
        ensure!(
            s.diag.iter().all(|d| !d.is_negative()),
            "trial {trial}: negative diagonal"
        );
        for w in s.diag.windows(2) {
            ensure!(
                w[1].is_multiple_of(&w[0]) || w[0].is_zero() && w[1].is_zero(),
                "trial {trial}: {} does not divide {}",
                w[0],
                w[1]
            );
        }
        ensure!(
            s.rank() == a.rank(),
            "trial {trial}: rank {} vs {}",
            s.rank(),
            a.rank()
        );
    }
    Ok(100)
}

/// Adjugate through cofactor determinants.
fn adjugate(b: &IntMatrix) -> IntMatrix {
    let r = b.rows();
    let mut adj = IntMatrix::zeros(r, r);
    if r == 1 {
        adj[(0, 0)] = BigInt::one();
        return adj;
    }
    for i in 0..r {
        for j in 0..r {
            let minor: Vec<Vec<BigInt>> = (0..r)
                .filter(|&k| k != j)
                .map(|k| {
                    (0..r)
                        .filter(|&l| l != i)
                        .map(|l| b[(k, l)].clone())
                        .collect()
                })
                .collect();
            let d = IntMatrix::from_rows(r - 1, &minor).det();
            adj[(i, j)] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    adj
}

fn quotient_vs_cosets(rng: &mut StdRng) -> Result<usize, String> {
    let mut done = 0;
    while done < 60 {
        let r = rng.gen_range(1..=4);
        let b = random_matrix(rng, r, r, 6);
        let det = b.det().abs();
        if det.is_zero() || det > BigInt::from(200) {
            continue;
        }
        let order = det.to_u64().unwrap();
        // a redundant generator leaves the lattice unchanged
        let mix: Vec<i64> = (0..r).map(|_| rng.gen_range(-3..=3)).collect();
        let mut cols: Vec<Vec<BigInt>> = (0..r).map(|j| b.column(j)).collect();
        cols.push(b.mul_vec(&big(&mix)));
        let lattice = IntMatrix::from_columns(r, &cols);

        // x lies in L exactly when adj(B) x = 0 mod |det B|, so this embeds Z^r/L
        let adj = adjugate(&b);
        let phi = |x: &[BigInt]| -> Vec<u64> {
            adj.mul_vec(x)
                .iter()
                .map(|v| v.mod_floor(&det).to_u64().unwrap())
                .collect()
        };
        let units: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut e = vec![BigInt::zero(); r];
                e[i] = BigInt::one();
                phi(&e)
            })
            .collect();
        let mut group: HashSet<Vec<u64>> = HashSet::from([vec![0; r]]);
        let mut queue = VecDeque::from([vec![0u64; r]]);
        while let Some(g) = queue.pop_front() {
            for u in &units {
                let h: Vec<u64> = g.iter().zip(u).map(|(x, y)| (x + y) % order).collect();
                if group.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        ensure!(
            group.len() as u64 == order,
            "coset count {} vs |det| {order}",
            group.len()
        );

        let q = quotient(&lattice);
        ensure!(
            q.order() == Some(det.clone()),
            "order {:?} vs {order}",
            q.order()
        );
        for k in 1..=order {
            if !order.is_multiple_of(k) {
                continue;
            }
            let killed = group
                .iter()
                .filter(|g| g.iter().all(|x| (k * x) % order == 0))
                .count() as u64;
            let predicted: u64 = q
                .invariant_factors
                .iter()
                .map(|d| d.to_u64().unwrap().gcd(&k))
                .product();
            ensure!(
                killed == predicted,
                "{}: {killed} elements killed by {k}, factors predict {predicted}",
                q
            );
        }
        for _ in 0..10 {
            let x: Vec<i64> = (0..r).map(|_| rng.gen_range(-10..=10)).collect();
            let x = big(&x);
            let zero = push_to_quotient(&x, &q).map_err(err)?.is_zero();
            ensure!(
                zero == phi(&x).iter().all(|&v| v == 0),
                "membership disagrees at {x:?}"
            );
        }
        done += 1;
    }
    Ok(done)
}

fn cone_round_trips(rng: &mut StdRng) -> Result<usize, String> {
    let mut done = 0;
    while done < 50 {
        let d = rng.gen_range(1..=4);
        let k = rng.gen_range(d..=d + 3);
        // positive first coordinate keeps the cone pointed
        let gens: Vec<Vec<i64>> = (0..k)
            .map(|_| {
                let mut g = vec![rng.gen_range(1..=5)];
                g.extend((1..d).map(|_| rng.gen_range(-5..=5)));
                g
            })
            .collect();
        let cone = RationalCone::new(d, &gens).map_err(err)?;
        if !cone.is_full_dimensional() {
            continue;
        }
        ensure!(cone.is_pointed(), "{gens:?} reported not pointed");
        let back = cone.generators_from_facets().map_err(err)?;
        ensure!(
            back.facets() == cone.facets(),
            "{gens:?}: facets changed after round trip"
        );
        let original: BTreeSet<&Vec<BigInt>> = cone.generators().iter().collect();
        for ray in back.generators() {
            ensure!(
                original.contains(ray),
                "{gens:?}: recovered ray {ray:?} is not a generator"
            );
            let tight = cone
                .facets()
                .iter()
                .filter(|f| {
                    f.iter()
                        .zip(ray)
                        .map(|(a, b)| a * b)
                        .sum::<BigInt>()
                        .is_zero()
                })
                .count();
            ensure!(
                tight >= d - 1,
                "{gens:?}: ray {ray:?} lies on only {tight} facets"
            );
        }
        done += 1;
    }
    Ok(done)
}

fn kernel_properties() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let a = snf_invariants(&mut rng)?;
    let b = quotient_vs_cosets(&mut rng)?;
    let c = cone_round_trips(&mut rng)?;
    Ok(format!("{a} SNFs, {b} quotients, {c} cones"))
}

fn main() -> ExitCode {
    let checks: [Criterion; 7] = [
        ("gorenstein grid closed form", gorenstein_grid, 10),
        ("veronese class groups and shifts", veronese, 1),
        ("fano products: U, Cl(T), freeness", fano_grid, 5),
        ("blow-up card", blowup_facts, 1),
        (
            "hilbert verification of the blow-up shift",
            hilbert_verification,
            10,
        ),
        ("section oracles vs enumeration", oracle_equivalence, 5),
        ("lattice and cone kernels", kernel_properties, 30),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(limit);
        let (ok, detail) = match outcome {
            Ok(d) if elapsed < limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "{} [{}] {name}: {detail} ({:.2} s, limit {} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of {} passed", 7 - failed, 7);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
