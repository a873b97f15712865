"""Bindings for the qvar C++ library."""

import json

from ._qvar import (
    __version__,
    classify_arc,
    cm_ft,
    complete_poly_sum,
    greedy_jump_count,
    hvar,
    ivar,
    lazy_jump_count,
    mobius,
    poly_kernel_ft,
    prime_kernel_ft,
    ramanujan_sum,
    reduced_residues,
    time_grid,
    totient,
    von_mangoldt_table,
)
from . import _qvar


def _settings(kw):
    out = {}
    for k, v in kw.items():
        if isinstance(v, (list, tuple)):
            v = ",".join(str(x) for x in v)
        out[k] = str(v)
    return out


def verify_arith(**settings):
    return json.loads(_qvar._verify_arith(_settings(settings)))


def approx_scan(**settings):
    return json.loads(_qvar._approx_scan(_settings(settings)))


def variation_scan(**settings):
    return json.loads(_qvar._variation_scan(_settings(settings)))


def multifreq_scan(**settings):
    return json.loads(_qvar._multifreq_scan(_settings(settings)))
