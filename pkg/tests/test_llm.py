import json
import random
import string
import threading

import httpx
import pytest

from codemix.corpus import EN_BN, EN_HI, Direction
from codemix.llm import (
    AuthenticationError,
    BackendError,
    CompletionParams,
    CompletionResult,
    DegenerateFlag,
    FixtureMissError,
    HTTPChatBackend,
    MockBackend,
    RateLimiter,
    Recorder,
    ScriptedBackend,
    TransportError,
    complete,
    detect_degenerate,
    prompt_hash,
    resolve_backend,
)
from codemix.prompts import PromptVariant, render_kshot

PROMPT = render_kshot(EN_HI, Direction.EN2CM, PromptVariant.KSHOT_BETA, 0, [],
                      "He put it back on the market.")


def no_sleep(_):
    pass


# ---------------------------------------------------------------- degenerate

def test_empty_and_whitespace_flag_empty():
    assert detect_degenerate("") == {DegenerateFlag.EMPTY}
    assert detect_degenerate("   \n\t ") == {DegenerateFlag.EMPTY}


def test_681_fold_repetition_flags_repetition():
    text = "aapne " * 681
    assert detect_degenerate(text) == {DegenerateFlag.REPETITION}


def test_normal_sentence_unflagged():
    assert detect_degenerate("Unhone ise market mein vapas daal diya.") == frozenset()


def test_ten_consecutive_identical_tokens_flag_even_when_short():
    text = "word " * 10
    assert DegenerateFlag.REPETITION in detect_degenerate(text.strip())
    assert detect_degenerate(("word " * 9).strip()) == frozenset()


def test_dominance_requires_twenty_tokens():
    # 10 interleaved repeats of one token: dominance > 50% but only 19 tokens
    tokens = []
    for i in range(9):
        tokens += ["la", f"w{i}"]
    tokens.append("la")
    assert detect_degenerate(" ".join(tokens)) == frozenset()
    tokens += ["la", "za"]  # 21 tokens, "la" now 11 of them
    assert detect_degenerate(" ".join(tokens)) == {DegenerateFlag.REPETITION}


def test_exactly_half_dominance_not_flagged():
    # interleaved so no consecutive run forms; 10 of 20 tokens is not > 50%
    tokens = [t for i in range(10) for t in ("la", f"w{i}")]
    assert detect_degenerate(" ".join(tokens)) == frozenset()


def test_random_distinct_token_sentences_never_flagged():
    rng = random.Random(20240818)
    for _ in range(1000):
        n = rng.randint(1, 9)
        words = set()
        while len(words) < n:
            words.add("".join(rng.choices(string.ascii_lowercase, k=rng.randint(2, 9))))
        assert detect_degenerate(" ".join(words)) == frozenset()


# ---------------------------------------------------------------- params

def test_params_validation():
    CompletionParams(temperature=0.0, max_retries=0)
    with pytest.raises(ValueError, match="temperature"):
        CompletionParams(temperature=-0.1)
    with pytest.raises(ValueError, match="max_retries"):
        CompletionParams(max_retries=-1)
    with pytest.raises(ValueError, match="timeout"):
        CompletionParams(timeout=0)


def test_params_dict_roundtrip():
    p = CompletionParams(model_name="m", temperature=0.5, max_output_tokens=64,
                         timeout=10.0, max_retries=2)
    assert CompletionParams.from_dict(p.to_dict()) == p


def test_result_requires_positive_attempts():
    with pytest.raises(ValueError, match="attempts"):
        CompletionResult(text="x", latency=0.0, attempts=0, backend_id="b")


# ---------------------------------------------------------------- mock backend

def test_mock_fixture_echo():
    backend = MockBackend()
    backend.add(PROMPT.text, "Unhone ise market mein vapas daal diya.")
    result = complete(backend, PROMPT)
    assert result.text == "Unhone ise market mein vapas daal diya."
    assert result.attempts == 1
    assert result.degenerate_flags == frozenset()


def test_mock_strict_miss_names_hash():
    backend = MockBackend(strict=True)
    with pytest.raises(FixtureMissError, match=prompt_hash(PROMPT.text)):
        backend.send(PROMPT.text, CompletionParams())


def test_mock_lenient_echoes_last_nonempty_line():
    backend = MockBackend(strict=False)
    out = backend.send("first line\nsecond line\n\n", CompletionParams())
    assert out == "second line"


def test_mock_hash_ignores_unicode_normalization_form():
    nfc = "café question"
    nfd = "café question"
    backend = MockBackend({prompt_hash(nfc): "ok"})
    assert backend.send(nfd, CompletionParams()) == "ok"


def test_mock_jsonl_roundtrip(tmp_path):
    path = tmp_path / "fixtures.jsonl"
    rows = [{"prompt_hash": prompt_hash("p1"), "response": "r1"},
            {"prompt_hash": prompt_hash("p2"), "response": "r2"}]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    backend = MockBackend.from_jsonl(path)
    assert backend.send("p1", CompletionParams()) == "r1"
    assert backend.send("p2", CompletionParams()) == "r2"


def test_mock_jsonl_rejects_malformed_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"prompt_hash": "x"}\n', encoding="utf-8")
    with pytest.raises(BackendError, match="bad.jsonl:1"):
        MockBackend.from_jsonl(path)


# ---------------------------------------------------------------- retries

def test_retries_then_success_with_backoff():
    backend = ScriptedBackend([TransportError("x"), TransportError("y"), "done"])
    delays = []
    result = complete(backend, PROMPT, CompletionParams(max_retries=3),
                      sleep=delays.append)
    assert result.text == "done"
    assert result.attempts == 3
    assert delays == [0.5, 1.0]


def test_retries_exhausted_raises_transport_error():
    backend = ScriptedBackend([TransportError(str(i)) for i in range(5)])
    with pytest.raises(TransportError):
        complete(backend, PROMPT, CompletionParams(max_retries=2), sleep=no_sleep)
    assert backend.calls_made == 3  # initial attempt + 2 retries


def test_zero_retries_fails_on_first_transport_error():
    backend = ScriptedBackend([TransportError("x"), "never reached"])
    with pytest.raises(TransportError):
        complete(backend, PROMPT, CompletionParams(max_retries=0), sleep=no_sleep)
    assert backend.calls_made == 1


def test_auth_error_is_not_retried():
    backend = ScriptedBackend([AuthenticationError("bad key"), "never reached"])
    with pytest.raises(AuthenticationError):
        complete(backend, PROMPT, CompletionParams(max_retries=5), sleep=no_sleep)
    assert backend.calls_made == 1


def test_degenerate_flags_attached_to_result():
    backend = ScriptedBackend(["", "aapne " * 681])
    r1 = complete(backend, PROMPT, sleep=no_sleep)
    r2 = complete(backend, PROMPT, sleep=no_sleep)
    assert r1.degenerate_flags == {DegenerateFlag.EMPTY}
    assert r2.degenerate_flags == {DegenerateFlag.REPETITION}


def test_scripted_backend_exhaustion():
    backend = ScriptedBackend(["only one"])
    complete(backend, PROMPT, sleep=no_sleep)
    with pytest.raises(BackendError, match="exhausted"):
        complete(backend, PROMPT, sleep=no_sleep)


# ---------------------------------------------------------------- rate limiter

class FakeClock:
    def __init__(self):
        self.now = 0.0

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.now += seconds


def test_rate_limiter_blocks_excess_calls():
    clock = FakeClock()
    limiter = RateLimiter(3, 10.0, clock=clock, sleep=clock.sleep)
    starts = [limiter.acquire() for _ in range(5)]
    # first three immediate at t=0, then one per freed slot at t=10
    assert starts[:3] == [0.0, 0.0, 0.0]
    assert starts[3] == 10.0 and starts[4] == 10.0
    windows_ok = all(
        sum(1 for s in starts if t - limiter.window_seconds < s <= t) <= 3
        for t in starts)
    assert windows_ok


def test_rate_limiter_sliding_window_frees_oldest_slot():
    clock = FakeClock()
    limiter = RateLimiter(2, 5.0, clock=clock, sleep=clock.sleep)
    assert limiter.acquire() == 0.0
    clock.now = 3.0
    assert limiter.acquire() == 3.0
    t = limiter.acquire()  # must wait for the t=0 slot to expire
    assert t == 5.0


def test_rate_limiter_validation():
    with pytest.raises(ValueError):
        RateLimiter(0, 1.0)
    with pytest.raises(ValueError):
        RateLimiter(1, 0.0)


def test_complete_uses_limiter():
    clock = FakeClock()
    limiter = RateLimiter(1, 2.0, clock=clock, sleep=clock.sleep)
    backend = ScriptedBackend(["a", "b", "c"])
    for _ in range(3):
        complete(backend, PROMPT, limiter=limiter, sleep=no_sleep)
    assert clock.now == 4.0  # second call waited to t=2, third to t=4


# ---------------------------------------------------------------- recorder

def test_recorder_sequences_and_kinds():
    recorder = Recorder()
    backend = ScriptedBackend(["one", "two", "three"])
    for _ in range(3):
        complete(backend, PROMPT, recorder=recorder, sleep=no_sleep)
    records = recorder.records
    assert [r.sequence for r in records] == [1, 2, 3]
    assert recorder.kinds() == ["kshot_beta0"] * 3
    assert all(r.pair_id == "en-hi" for r in records)
    assert [r.result.text for r in records] == ["one", "two", "three"]


def test_recorder_empty_run():
    assert Recorder().records == ()


def test_recorder_sequences_unique_under_threads():
    recorder = Recorder()
    backend = MockBackend(strict=False)
    errors = []

    def worker():
        try:
            for _ in range(50):
                complete(backend, PROMPT, recorder=recorder, sleep=no_sleep)
        except Exception as exc:  # pragma: no cover - surfaced via errors list
            errors.append(exc)

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    seqs = [r.sequence for r in recorder.records]
    assert sorted(seqs) == list(range(1, 201))
    assert seqs == sorted(seqs)  # append order matches assigned order


def test_recorder_replay_into_mock_reproduces_outputs(tmp_path):
    recorder = Recorder()
    backend = ScriptedBackend(["Unhone ise market mein vapas daal diya."])
    original = complete(backend, PROMPT, recorder=recorder, sleep=no_sleep)

    fixtures = tmp_path / "replay.jsonl"
    recorder.write_fixtures(fixtures)
    replay = MockBackend.from_jsonl(fixtures)
    replayed = complete(replay, PROMPT, sleep=no_sleep)
    assert replayed.text == original.text


def test_recorder_jsonl_has_full_audit_fields(tmp_path):
    recorder = Recorder(clock=lambda: 123.5)
    backend = ScriptedBackend(["out"])
    complete(backend, PROMPT, recorder=recorder, sleep=no_sleep)
    path = tmp_path / "calls.jsonl"
    recorder.to_jsonl(path)
    row = json.loads(path.read_text(encoding="utf-8").splitlines()[0])
    assert row["sequence"] == 1
    assert row["timestamp"] == 123.5
    assert row["prompt_kind"] == "kshot_beta0"
    assert row["prompt_hash"] == prompt_hash(PROMPT.text)
    assert row["result"]["text"] == "out"
    assert row["params"]["temperature"] == 0.0


# ---------------------------------------------------------------- http backend

def make_http_backend(handler):
    transport = httpx.MockTransport(handler)
    client = httpx.Client(transport=transport)
    return HTTPChatBackend("testsvc", "https://api.test/v1/chat", "test-model",
                           "sk-test", client=client)


def test_http_backend_sends_chat_payload():
    captured = {}

    def handler(request):
        captured["json"] = json.loads(request.content)
        captured["auth"] = request.headers.get("authorization")
        return httpx.Response(200, json={
            "choices": [{"message": {"content": "salut mon ami"}}]})

    backend = make_http_backend(handler)
    params = CompletionParams(model_name="ignored", temperature=0.0,
                              max_output_tokens=77)
    out = backend.send("bonjour", params)
    assert out == "salut mon ami"
    assert captured["json"]["model"] == "test-model"
    assert captured["json"]["messages"] == [{"role": "user", "content": "bonjour"}]
    assert captured["json"]["max_tokens"] == 77
    assert captured["auth"] == "Bearer sk-test"


@pytest.mark.parametrize("status,exc", [
    (429, TransportError), (500, TransportError), (503, TransportError),
    (401, AuthenticationError), (403, AuthenticationError),
    (404, BackendError),
])
def test_http_backend_maps_status_codes(status, exc):
    backend = make_http_backend(lambda request: httpx.Response(status, json={}))
    with pytest.raises(exc):
        backend.send("hi", CompletionParams())


def test_http_backend_maps_transport_failures():
    def handler(request):
        raise httpx.ConnectError("refused")

    backend = make_http_backend(handler)
    with pytest.raises(TransportError):
        backend.send("hi", CompletionParams())


def test_http_backend_rejects_malformed_body():
    backend = make_http_backend(
        lambda request: httpx.Response(200, json={"choices": []}))
    with pytest.raises(BackendError, match="malformed"):
        backend.send("hi", CompletionParams())


def test_http_backend_from_env(monkeypatch):
    monkeypatch.setenv("CODEMIX_ENDPOINT_SVC_A", "https://api.test/v1")
    monkeypatch.setenv("CODEMIX_API_KEY_SVC_A", "sk-a")
    monkeypatch.setenv("CODEMIX_MODEL_SVC_A", "model-a")
    backend = HTTPChatBackend.from_env("svc-a")
    assert backend.endpoint == "https://api.test/v1"
    assert backend.model_name == "model-a"

    monkeypatch.delenv("CODEMIX_API_KEY_SVC_A")
    with pytest.raises(AuthenticationError, match="CODEMIX_API_KEY_SVC_A"):
        HTTPChatBackend.from_env("svc-a")
    monkeypatch.delenv("CODEMIX_ENDPOINT_SVC_A")
    with pytest.raises(BackendError, match="CODEMIX_ENDPOINT_SVC_A"):
        HTTPChatBackend.from_env("svc-a")


def test_resolve_backend_variants(tmp_path):
    assert isinstance(resolve_backend("mock"), MockBackend)
    assert resolve_backend("mock").strict is False
    path = tmp_path / "f.jsonl"
    path.write_text(json.dumps({"prompt_hash": prompt_hash("p"),
                                "response": "r"}) + "\n", encoding="utf-8")
    strict = resolve_backend(f"mock:{path}")
    assert strict.strict is True
    with pytest.raises(BackendError):
        resolve_backend("unconfigured-remote")


# ---------------------------------------------------------------- determinism

def test_mock_pipeline_bit_reproducible_across_runs():
    fixtures = {prompt_hash(PROMPT.text): "stable answer"}

    def run_once():
        recorder = Recorder(clock=lambda: 0.0)
        backend = MockBackend(fixtures)
        complete(backend, PROMPT, recorder=recorder, sleep=no_sleep,
                 clock=lambda: 0.0)
        return [(r.prompt_hash, r.result.text, r.sequence) for r in recorder.records]

    assert run_once() == run_once()
