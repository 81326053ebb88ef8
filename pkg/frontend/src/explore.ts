/**
 * Explorer view: free-text query box, rendered chart, narrative panels,
 * and suggestion chips that resubmit their exact text as the next query.
 */

import { ApiClient, ApiError, Recommendation } from "./api.js";
import { ChartRenderer } from "./chart.js";

interface HistoryEntry {
  query: string;
  recommendation: Recommendation;
}

export interface ExploreOptions {
  datasetId: string;
  backend: string;
  renderer: ChartRenderer;
}

export class ExploreView {
  readonly history: HistoryEntry[] = [];
  /** Last in-flight operation; tests await this after dispatching DOM events. */
  pending: Promise<void> = Promise.resolve();

  private readonly input: HTMLInputElement;
  private readonly errorPanel: HTMLElement;
  private readonly chartEl: HTMLElement;
  private readonly narrativeEl: HTMLElement;
  private readonly chipsEl: HTMLElement;
  private readonly historyEl: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    private readonly options: ExploreOptions,
  ) {
    root.innerHTML = "";
    root.classList.add("explore-view");

    const form = document.createElement("form");
    form.className = "query-form";
    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.className = "query-input";
    this.input.placeholder = "Ask a question about the data…";
    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "Recommend";
    form.append(this.input, button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.pending = this.submit(this.input.value);
    });

    this.errorPanel = document.createElement("div");
    this.errorPanel.className = "error-panel";
    this.errorPanel.hidden = true;

    this.chartEl = document.createElement("div");
    this.chartEl.className = "chart";

    this.narrativeEl = document.createElement("div");
    this.narrativeEl.className = "narrative";

    this.chipsEl = document.createElement("div");
    this.chipsEl.className = "suggestion-chips";

    this.historyEl = document.createElement("ol");
    this.historyEl.className = "query-history";

    root.append(form, this.errorPanel, this.chartEl, this.narrativeEl, this.chipsEl, this.historyEl);
  }

  /** Submit a query verbatim; empty input is rejected without a request. */
  async submit(query: string): Promise<void> {
    if (!query.trim()) {
      this.showError("Enter a question before submitting.", null);
      return;
    }
    this.clearError();
    let recommendation: Recommendation;
    try {
      recommendation = await this.api.recommend(
        this.options.datasetId,
        query,
        this.options.backend,
      );
    } catch (error) {
      if (error instanceof ApiError) {
        const message =
          error.detail !== null &&
          typeof error.detail === "object" &&
          "error" in (error.detail as object)
            ? String((error.detail as { error: unknown }).error)
            : String(error.detail ?? error.message);
        this.showError(message, error.rawText);
        return;
      }
      throw error;
    }
    this.history.push({ query, recommendation });
    await this.show(this.history.length - 1);
  }

  /** Re-render the history entry at `index` (used by the back control). */
  async show(index: number): Promise<void> {
    const entry = this.history[index];
    this.input.value = entry.query;

    this.chartEl.innerHTML = "";
    if (entry.recommendation.doc !== null) {
      await this.options.renderer(this.chartEl, entry.recommendation.doc);
    } else {
      const note = document.createElement("p");
      note.className = "no-chart";
      note.textContent =
        "No chart could be compiled for this recommendation.";
      this.chartEl.append(note);
    }

    this.renderNarrative(entry.recommendation);
    this.renderChips(entry.recommendation.narrative.suggestions);
    this.renderHistory();
  }

  async back(): Promise<void> {
    if (this.history.length < 2) {
      return;
    }
    this.history.pop();
    await this.show(this.history.length - 1);
  }

  private renderNarrative(recommendation: Recommendation): void {
    this.narrativeEl.innerHTML = "";
    const spec = document.createElement("code");
    spec.className = "vegazero";
    spec.textContent = recommendation.vegazero;

    const explanation = document.createElement("p");
    explanation.className = "explanation";
    explanation.textContent = `${recommendation.narrative.e1} ${recommendation.narrative.e2}`.trim();

    const caption = document.createElement("p");
    caption.className = "caption";
    caption.textContent = recommendation.narrative.caption;

    this.narrativeEl.append(spec, explanation, caption);

    if (recommendation.warnings.length > 0) {
      const warnings = document.createElement("ul");
      warnings.className = "warnings";
      for (const warning of recommendation.warnings) {
        const item = document.createElement("li");
        item.textContent = `${warning.code}: ${warning.message}`;
        warnings.append(item);
      }
      this.narrativeEl.append(warnings);
    }
  }

  private renderChips(suggestions: string[]): void {
    this.chipsEl.innerHTML = "";
    for (const suggestion of suggestions) {
      const chip = document.createElement("button");
      chip.type = "button";
      chip.className = "suggestion-chip";
      chip.textContent = suggestion;
      chip.addEventListener("click", () => {
        this.pending = this.submit(suggestion);
      });
      this.chipsEl.append(chip);
    }
  }

  private renderHistory(): void {
    this.historyEl.innerHTML = "";
    for (const entry of this.history) {
      const item = document.createElement("li");
      item.textContent = entry.query;
      this.historyEl.append(item);
    }
  }

  private showError(message: string, rawText: string | null): void {
    this.errorPanel.hidden = false;
    this.errorPanel.innerHTML = "";
    const headline = document.createElement("p");
    headline.className = "error-message";
    headline.textContent = message;
    this.errorPanel.append(headline);
    if (rawText !== null) {
      const raw = document.createElement("pre");
      raw.className = "raw-text";
      raw.textContent = rawText;
      this.errorPanel.append(raw);
    }
  }

  private clearError(): void {
    this.errorPanel.hidden = true;
    this.errorPanel.innerHTML = "";
  }
}
