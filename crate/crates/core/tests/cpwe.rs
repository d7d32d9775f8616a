use layernet::consistency::{check_accessibility, check_compatibility, consistency_check};
use layernet::faultsim::{enumerate_spofs, generate_fmea};
use layernet::fixtures;
use layernet::paths::{realize_link, Exclusions};
use layernet::structure::validate_structure;

#[test]
fn structurally_valid() {
    let m = fixtures::cpwe();
    let report = validate_structure(&m, true);
    assert!(report.violations.is_empty(), "{}", report.render());
}

#[test]
fn every_link_realizes() {
    let m = fixtures::cpwe();
    for l in m.links() {
        let tree = realize_link(&m, l.key.layer, &l.key.a, &l.key.b, &Exclusions::none()).unwrap();
        assert!(tree.is_some(), "{} does not realize", l.key);
    }
}

#[test]
fn protocols_agree() {
    assert!(check_compatibility(&fixtures::cpwe()).is_empty());
}

#[test]
fn requirements_accessible_with_spofs() {
    let m = fixtures::cpwe();
    for req in m.requirements() {
        assert!(check_accessibility(&m, req).passed(), "{}", req.id);
    }
    let nms = enumerate_spofs(&m, m.requirement("r_nms").unwrap()).unwrap();
    let ids: Vec<String> = nms.iter().map(|e| e.to_string()).collect();
    // the single NMS workstation hangs off one VLAN
    assert_eq!(
        ids,
        [
            "comp:ws_nms1",
            "comp:cos_ws_nms1",
            "comp:vlan_nms",
            "link:2:cos_ws_nms1-vlan_nms"
        ]
    );
    assert_eq!(consistency_check(&m).verdict.to_string(), "inconsistent");
}

#[test]
fn fmea_covers_every_element() {
    let m = fixtures::cpwe();
    let rows = generate_fmea(&m).unwrap();
    assert_eq!(rows.len(), m.component_count() + m.link_count());
    assert!(rows.windows(2).all(|w| w[0].severity >= w[1].severity));
}
