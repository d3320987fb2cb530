"""Optional wrappers around Hugging Face models.

These need model weights on disk (or a network to fetch them), so they
are not exercised by the test suite; the protocol loop reports a missing
backend as ok:false per request instead of dying. Resampling to the
pipeline's 16 kHz interchange format happens here, inside the adapter.
"""

from __future__ import annotations

from .protocol import serve, write_sidecar


def _load_wav_float(path: str):
    import wave

    with wave.open(path, "rb") as wav:
        rate = wav.getframerate()
        raw = wav.readframes(wav.getnframes())
    samples = [int.from_bytes(raw[i:i + 2], "little", signed=True) / 32768.0
               for i in range(0, len(raw), 2)]
    return samples, rate


class HfAsr:
    """Speech recognition via a transformers ASR pipeline (e.g. wav2vec2)."""

    def __init__(self, model: str):
        self.model = model
        self._pipe = None

    def _pipeline(self):
        if self._pipe is None:
            from transformers import pipeline

            self._pipe = pipeline("automatic-speech-recognition", model=self.model)
        return self._pipe

    def transcribe(self, audio: str) -> str:
        import numpy as np

        samples, rate = _load_wav_float(audio)
        array = np.asarray(samples, dtype=np.float32)
        result = self._pipeline()({"array": array, "sampling_rate": rate})
        return result["text"]


class HfTts:
    """Synthesis via a transformers text-to-speech pipeline (e.g. MMS-TTS)."""

    def __init__(self, model: str):
        self.model = model
        self._pipe = None

    def _pipeline(self):
        if self._pipe is None:
            from transformers import pipeline

            self._pipe = pipeline("text-to-speech", model=self.model)
        return self._pipe

    def synthesize(self, text: str, out: str) -> str:
        import struct
        import wave

        import numpy as np

        result = self._pipeline()(text)
        audio = np.asarray(result["audio"], dtype=np.float32).reshape(-1)
        rate = int(result["sampling_rate"])
        if rate != 16000:
            duration = len(audio) / rate
            grid = np.linspace(0.0, duration, round(duration * 16000),
                               endpoint=False)
            audio = np.interp(grid, np.linspace(0.0, duration, len(audio),
                                                endpoint=False), audio)
        pcm = np.clip(audio, -1.0, 1.0)
        write_sidecar(out, text, valid=True)
        with wave.open(out, "wb") as wav:
            wav.setnchannels(1)
            wav.setsampwidth(2)
            wav.setframerate(16000)
            wav.writeframes(struct.pack(
                f"<{len(pcm)}h", *(int(v * 32767) for v in pcm)))
        return out


class HfEstimator:
    """Failure estimator via a transformer sequence classifier, fine-tuned
    from the pretrained checkpoint on every fit request."""

    def __init__(self, model: str, epochs: int = 2):
        self.model_name = model
        self.epochs = epochs
        self._tokenizer = None
        self._model = None

    def fit(self, data: list[dict]) -> None:
        import torch
        from transformers import (AutoModelForSequenceClassification,
                                  AutoTokenizer)

        self._tokenizer = AutoTokenizer.from_pretrained(self.model_name)
        self._model = AutoModelForSequenceClassification.from_pretrained(
            self.model_name, num_labels=2)
        texts = [str(item["text"]) for item in data]
        labels = torch.tensor([int(item["label"]) for item in data])
        batch = self._tokenizer(texts, padding=True, truncation=True,
                                return_tensors="pt")
        optimizer = torch.optim.AdamW(self._model.parameters(), lr=2e-5)
        self._model.train()
        for _ in range(self.epochs):
            optimizer.zero_grad()
            loss = self._model(**batch, labels=labels).loss
            loss.backward()
            optimizer.step()
        self._model.eval()

    def predict(self, texts: list[str]) -> list[float]:
        import torch

        if self._model is None:
            raise RuntimeError("fit must be called before predict")
        batch = self._tokenizer(texts, padding=True, truncation=True,
                                return_tensors="pt")
        with torch.no_grad():
            logits = self._model(**batch).logits
        return torch.softmax(logits, dim=-1)[:, 1].tolist()


def serve_hf_asr(model: str) -> None:
    serve(HfAsr(model), "asr")


def serve_hf_tts(model: str) -> None:
    serve(HfTts(model), "tts")


def serve_hf_estimator(model: str) -> None:
    serve(HfEstimator(model), "estimator")
