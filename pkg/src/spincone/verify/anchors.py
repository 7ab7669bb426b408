"""Source labels attached to every report line.

This table is the only place where the labels of the reference statements
appear; suites and messages look them up by key.
"""

ANCHORS = {
    "clifford_relations": "Prop. 2.1",
    "identification_eq21": "Prop. 2.1, Eq. (2.1)",
    "gauss_formula_eq22": "Eq. (2.2), Eq. (2.7)",
    "em_tensor_prop24": "Prop. 2.4, §2.3",
    "tkilling_traces_eq24_25": "Eqs. (2.4)-(2.5)",
    "curvature_ids_eq29_210": "Eqs. (2.9)-(2.10)",
    "killing_vector_prop27": "Prop. 2.7",
    "oneill_prop33": "Prop. 3.3",
    "oneill_prop34": "Prop. 3.4",
    "oneill_prop35": "Prop. 3.5",
    "cone_extrinsic_s3": "§3 (extrinsic displays at t = 1)",
    "bt_gt_s4": "§4 (B^t, G_t)",
    "ricci_cor42": "Cor. 4.2, Prop. 4.1",
    "ricci_flat_remark43": "Remark 4.3",
    "ricci_flat_thm51": "Thm. 5.1",
    "hijazi_integrand_eq23": "Thm. 2.2, Eq. (2.3)",
    # finer labels used in check-level anchors and messages
    "eq29": "Eq. (2.9)",
    "eq210": "Eq. (2.10)",
    "eq24": "Eq. (2.4)",
    "eq25": "Eq. (2.5)",
    "eq35": "Eq. (3.5)",
    "eq36": "Eq. (3.6)",
    "eq37": "Eq. (3.7)",
    "eq38": "Eq. (3.8)",
    "eq39": "Eq. (3.9)",
    "prop41": "Prop. 4.1",
    "cor42": "Cor. 4.2",
    "remark36": "Remark 3.6",
    "friedrich": "§2.2 (Friedrich bound)",
}


def anchor(key: str) -> str:
    return ANCHORS[key]
