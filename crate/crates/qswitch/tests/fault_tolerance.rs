use qswitch::protocol::{certification_suite, enumerate_faults};

#[test]
fn single_faults_are_detected_or_benign() {
    let mut bad = vec![];
    for nc in certification_suite().unwrap() {
        let rep = enumerate_faults(&nc.circuit, &nc.reference, 2, 1).unwrap();
        println!("{:24} sites {:5} detected {:5} benign {:5} failures {}", nc.name, rep.total_sites, rep.detected, rep.benign, rep.logical_failures.len());
        let is_control = nc.name == "negative-control";
        if is_control == rep.logical_failures.is_empty() {
            bad.push(nc.name.clone());
        }
    }
    assert!(bad.is_empty(), "unexpected enumeration results: {bad:?}");
}

#[test]
fn encoded_grover_tolerates_single_faults() {
    let c = qswitch::circuits::build_grover(true).unwrap();
    let rep = enumerate_faults(&c, &qswitch::protocol::Reference::grover(), 2, 1).unwrap();
    println!("grover-encoded sites {} detected {} benign {} failures {}", rep.total_sites, rep.detected, rep.benign, rep.logical_failures.len());
    assert!(rep.logical_failures.is_empty(), "{:?}", &rep.logical_failures[..rep.logical_failures.len().min(5)]);
}

#[test]
fn unencoded_grover_has_single_fault_failures() {
    let c = qswitch::circuits::build_grover(false).unwrap();
    let rep = enumerate_faults(&c, &qswitch::protocol::Reference::grover(), 2, 1).unwrap();
    assert!(!rep.logical_failures.is_empty());
}
