//! Small hand-checked instances with values fixed before the solvers existed.

use kernelsched::iea::{solve_exact, SolveOptions};
use kernelsched::ldt::{analyze, ldt, ReleaseOverrides};
use kernelsched::oracle::brute_force;
use kernelsched::ptas::{solve_approx, PtasOptions};
use kernelsched::Instance;

fn urgent_after_long() -> Instance {
    Instance::from_triples(&[(0, 5, 0), (1, 2, 10), (3, 1, 9)]).unwrap()
}

fn long_blocker() -> Instance {
    Instance::from_triples(&[(0, 10, 0), (2, 3, 6), (4, 2, 8)]).unwrap()
}

#[test]
fn ldt_values() {
    let a = urgent_after_long();
    let s = ldt(&a, &ReleaseOverrides::new());
    assert_eq!(s.jobs(), vec![0, 1, 2]);
    assert_eq!(s.makespan(&a), 17);
    let b = long_blocker();
    assert_eq!(ldt(&b, &ReleaseOverrides::new()).makespan(&b), 21);
}

#[test]
fn optimum_values() {
    assert_eq!(brute_force(&urgent_after_long(), 10, true).unwrap().1, 13);
    assert_eq!(brute_force(&long_blocker(), 10, true).unwrap().1, 17);
}

#[test]
fn delaying_job_is_the_long_first_job() {
    let a = urgent_after_long();
    let s = ldt(&a, &ReleaseOverrides::new());
    let k = &analyze(&a, &s).kernels[0];
    assert_eq!(k.delaying, Some(0));
    assert_eq!(k.delay, 4);
}

#[test]
fn solvers_reach_the_optimum() {
    for (inst, opt) in [(urgent_after_long(), 13), (long_blocker(), 17)] {
        let r = solve_exact(&inst, &SolveOptions::default());
        assert_eq!(r.makespan, opt);
        assert!(r.certificate.is_optimal());
        let a = solve_approx(&inst, &PtasOptions::new(2)).unwrap();
        assert!(a.makespan * 2 <= 3 * opt);
    }
}
