//! Figure recipes shipped with the crate.

/// (name, config text) of every shipped recipe, in run order.
pub const RECIPES: &[(&str, &str)] = &[
    ("fig3_m1_n1", include_str!("../../recipes/fig3_m1_n1.cfg")),
    ("fig3_m1_n4", include_str!("../../recipes/fig3_m1_n4.cfg")),
    ("fig3_m4_n1", include_str!("../../recipes/fig3_m4_n1.cfg")),
    ("fig3_m4_n4", include_str!("../../recipes/fig3_m4_n4.cfg")),
    ("fig4_phi15_l2.0", include_str!("../../recipes/fig4_phi15_l2.0.cfg")),
    ("fig4_phi15_l2.5", include_str!("../../recipes/fig4_phi15_l2.5.cfg")),
    ("fig4_phi15_l3.0", include_str!("../../recipes/fig4_phi15_l3.0.cfg")),
    ("fig4_phi60_l2.0", include_str!("../../recipes/fig4_phi60_l2.0.cfg")),
    ("fig4_phi60_l2.5", include_str!("../../recipes/fig4_phi60_l2.5.cfg")),
    ("fig4_phi60_l3.0", include_str!("../../recipes/fig4_phi60_l3.0.cfg")),
    ("fig5_vlc30", include_str!("../../recipes/fig5_vlc30.cfg")),
];

pub fn find(name: &str) -> Option<&'static str> {
    RECIPES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
