//! The nine acceptance criteria, one line each.
//!
//! Criterion 6 asks for set equality between spanning-tree blocker vertices
//! and all scaled feasible-partition indicators. That equality is false:
//! on the path a–c–b the partition {a},{c},{b} gives (1/2, 1/2), which is not
//! extreme. The criterion is reported as failing, and this target instead
//! asserts the inclusion that does hold.

use pmodulus::verify::{path_blocker_exact, run_all, tree_blocker_report, CRITERIA};

/// Criteria whose literal statement is known to be false.
const KNOWN_FALSE: [usize; 1] = [6];

#[test]
fn acceptance_criteria() {
    let results = run_all(0);
    assert_eq!(results.len(), CRITERIA);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert_eq!(failed, KNOWN_FALSE, "unexpected criterion outcomes");
}

#[test]
fn tree_blocker_inclusion() {
    let (exact, _) = path_blocker_exact().unwrap();
    assert!(exact);
    let r = tree_blocker_report(5).unwrap();
    assert!(r.inclusion_holds(), "{r:?}");
    assert!(r.non_extreme_partitions > 0);
    assert_eq!(r.graphs, 1 + 4 + 38 + 728);
}
