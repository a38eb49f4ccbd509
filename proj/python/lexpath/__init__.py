"""Reasoning-schema bundles, guided sessions and case suggestions.

Bundles are canonical JSON documents. Functions here accept and return
Python values; the extension module underneath speaks JSON text.
"""

import json

from . import _lexpath

__all__ = [
    "LexpathError",
    "Service",
    "apportion_percentages",
    "canonicalize",
    "demo_bundle",
    "demo_corpus",
    "paths",
    "replay",
    "suggest",
    "synthetic_bundle",
    "synthetic_corpus",
    "validate",
    "walkthrough_answers",
]


class LexpathError(ValueError):
    def __init__(self, code, message):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def _call(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except _lexpath.Error as e:
        code, message = e.args[0] if len(e.args) == 1 else e.args
        raise LexpathError(code, message) from None


def _doc(bundle):
    return bundle if isinstance(bundle, str) else json.dumps(bundle)


def validate(bundle, strict=False):
    return json.loads(_call(_lexpath.validate, _doc(bundle), strict))


def canonicalize(bundle, strict=False):
    """Import and re-export; returns the canonical document text."""
    return _call(_lexpath.canonicalize, _doc(bundle), strict)


def paths(bundle):
    return json.loads(_call(_lexpath.paths, _doc(bundle)))


def replay(bundle, answers):
    return json.loads(_call(_lexpath.replay, _doc(bundle), list(answers)))


def suggest(corpus, query, k=100, exact=False, seed=42):
    if not isinstance(corpus, str):
        corpus = "".join(json.dumps(c) + "\n" for c in corpus)
    return json.loads(_call(_lexpath.suggest, corpus, query, k, exact, seed))


def demo_bundle():
    return _lexpath.demo_bundle()


def demo_corpus():
    return _lexpath.demo_corpus()


def walkthrough_answers():
    return _lexpath.walkthrough_answers()


def synthetic_bundle(seed, blocks, cases):
    return _lexpath.synthetic_bundle(seed, blocks, cases)


def synthetic_corpus(seed, cases, sentences):
    return _lexpath.synthetic_corpus(seed, cases, sentences)


def apportion_percentages(counts):
    return _lexpath.apportion_percentages(list(counts))


class Service:
    """In-process version of the HTTP API. Calls return (status, body)."""

    def __init__(self, bundle=None, admin_token="", event_log_path=""):
        self._svc = _lexpath.Service(admin_token, event_log_path)
        if bundle is not None:
            _call(self._svc.load_bundle, _doc(bundle))

    @staticmethod
    def _reply(pair):
        status, body = pair
        return status, json.loads(body)

    def load_bundle(self, bundle):
        _call(self._svc.load_bundle, _doc(bundle))

    def create_session(self):
        return self._reply(self._svc.create_session())

    def get_session(self, session_id):
        return self._reply(self._svc.get_session(session_id))

    def submit_answer(self, session_id, answer_id):
        return self._reply(self._svc.submit_answer(session_id, json.dumps({"answer_id": answer_id})))

    def revise(self, session_id, step_index, answer_id):
        body = json.dumps({"answer_id": answer_id})
        return self._reply(self._svc.revise(session_id, str(step_index), body))

    def record_event(self, event):
        return self._reply(self._svc.record_event(json.dumps(event)))

    def submit_feedback(self, feedback):
        return self._reply(self._svc.submit_feedback(json.dumps(feedback)))

    def pathway_stats(self, start=None, end=None, role=None):
        return self._reply(self._svc.pathway_stats(start, end, role))

    def feedback_stats(self):
        return self._reply(self._svc.feedback_stats())

    def usage_stats(self):
        return self._reply(self._svc.usage_stats())

    def admin_reload(self, token):
        return self._reply(self._svc.admin_reload(token))
