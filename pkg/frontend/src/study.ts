/**
 * Blind comparative-study view: walks a participant through their assigned
 * samples, collecting a full Likert form for both anonymous sides, and ends
 * on a thank-you screen. The client never sees or stores model identity.
 */

import { ApiClient, ApiError, StudyResponseView, StudySampleView } from "./api.js";
import { ChartRenderer } from "./chart.js";

export const SCORE_DIMENSIONS = [
  "vis_quality",
  "e_informativeness",
  "e_usefulness",
  "c_informativeness",
  "c_usefulness",
  "s_informativeness",
  "s_usefulness",
  "overall_narrative",
] as const;

export const SIDES = ["a", "b"] as const;

const DIMENSION_LABELS: Record<(typeof SCORE_DIMENSIONS)[number], string> = {
  vis_quality: "Visualization quality",
  e_informativeness: "Explanation informativeness",
  e_usefulness: "Explanation usefulness",
  c_informativeness: "Caption informativeness",
  c_usefulness: "Caption usefulness",
  s_informativeness: "Suggestions informativeness",
  s_usefulness: "Suggestions usefulness",
  overall_narrative: "Overall narrative",
};

export class StudyView {
  participantId: string | null = null;
  currentSample: StudySampleView | null = null;
  ratingsSubmitted = 0;
  /** Last in-flight operation; tests await this after dispatching DOM events. */
  pending: Promise<void> = Promise.resolve();

  private readonly statusEl: HTMLElement;
  private readonly pairEl: HTMLElement;
  private readonly formEl: HTMLFormElement;
  private readonly submitButton: HTMLButtonElement;
  private expertise: number | undefined;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    private readonly renderer: ChartRenderer,
  ) {
    root.innerHTML = "";
    root.classList.add("study-view");

    this.statusEl = document.createElement("div");
    this.statusEl.className = "study-status";

    this.pairEl = document.createElement("div");
    this.pairEl.className = "study-pair";

    this.formEl = document.createElement("form");
    this.formEl.className = "rating-form";
    this.submitButton = document.createElement("button");
    this.submitButton.type = "submit";
    this.submitButton.textContent = "Submit ratings";
    this.formEl.addEventListener("submit", (event) => {
      event.preventDefault();
      this.pending = this.submitRatings();
    });

    root.append(this.statusEl, this.pairEl, this.formEl);
  }

  /** Begin (or resume) the participant's assignment. */
  async start(participantId: string, expertise?: number): Promise<void> {
    this.participantId = participantId;
    this.expertise = expertise;
    await this.loadNext();
  }

  private async loadNext(): Promise<void> {
    if (this.participantId === null) {
      return;
    }
    let next;
    try {
      next = await this.api.studyNext(this.participantId);
    } catch (error) {
      if (error instanceof ApiError) {
        this.showStatus(`Could not fetch the next sample: ${error.message}`, "retry-prompt");
        return;
      }
      throw error;
    }
    if (next.done) {
      this.currentSample = null;
      this.pairEl.innerHTML = "";
      this.formEl.innerHTML = "";
      this.showStatus(
        "All assigned samples are rated. Thank you for participating!",
        "thank-you",
      );
      return;
    }
    this.currentSample = next.sample;
    await this.renderSample(next.sample);
  }

  private async renderSample(sample: StudySampleView): Promise<void> {
    this.showStatus(`Sample ${this.ratingsSubmitted + 1} of your assignment`, "progress");
    this.pairEl.innerHTML = "";

    const query = document.createElement("p");
    query.className = "study-query";
    query.textContent = sample.query;
    this.pairEl.append(query);

    for (const side of SIDES) {
      this.pairEl.append(await this.renderSide(side, sample.responses[side]));
    }
    this.renderForm();
  }

  private async renderSide(
    side: (typeof SIDES)[number],
    response: StudyResponseView,
  ): Promise<HTMLElement> {
    const panel = document.createElement("section");
    panel.className = `study-side study-side-${side}`;

    const heading = document.createElement("h3");
    heading.textContent = `Recommendation ${side.toUpperCase()}`;
    panel.append(heading);

    const chart = document.createElement("div");
    chart.className = "chart";
    if (response.doc !== null) {
      await this.renderer(chart, response.doc);
    } else {
      chart.textContent = response.vegazero;
    }
    panel.append(chart);

    const explanation = document.createElement("p");
    explanation.className = "explanation";
    explanation.textContent = `${response.narrative.e1} ${response.narrative.e2}`.trim();
    const caption = document.createElement("p");
    caption.className = "caption";
    caption.textContent = response.narrative.caption;
    const suggestions = document.createElement("ol");
    suggestions.className = "suggestions";
    for (const text of response.narrative.suggestions) {
      const item = document.createElement("li");
      item.textContent = text;
      suggestions.append(item);
    }
    panel.append(explanation, caption, suggestions);
    return panel;
  }

  private renderForm(): void {
    this.formEl.innerHTML = "";
    for (const side of SIDES) {
      const fieldset = document.createElement("fieldset");
      const legend = document.createElement("legend");
      legend.textContent = `Rate recommendation ${side.toUpperCase()}`;
      fieldset.append(legend);
      for (const dim of SCORE_DIMENSIONS) {
        const label = document.createElement("label");
        label.textContent = `${DIMENSION_LABELS[dim]} `;
        const select = document.createElement("select");
        select.name = `${dim}_${side}`;
        select.required = true;
        const placeholder = document.createElement("option");
        placeholder.value = "";
        placeholder.textContent = "—";
        select.append(placeholder);
        for (let value = 1; value <= 5; value += 1) {
          const option = document.createElement("option");
          option.value = String(value);
          option.textContent = String(value);
          select.append(option);
        }
        select.addEventListener("change", () => this.refreshSubmitState());
        label.append(select);
        fieldset.append(label);
      }
      this.formEl.append(fieldset);
    }
    this.formEl.append(this.submitButton);
    this.refreshSubmitState();
  }

  /** The scores currently entered, or null while any field is blank. */
  collectScores(): Record<string, number> | null {
    const scores: Record<string, number> = {};
    for (const side of SIDES) {
      for (const dim of SCORE_DIMENSIONS) {
        const select = this.formEl.querySelector<HTMLSelectElement>(
          `select[name="${dim}_${side}"]`,
        );
        if (select === null || select.value === "") {
          return null;
        }
        scores[`${dim}_${side}`] = Number(select.value);
      }
    }
    return scores;
  }

  private refreshSubmitState(): void {
    this.submitButton.disabled = this.collectScores() === null;
  }

  async submitRatings(): Promise<void> {
    const scores = this.collectScores();
    if (scores === null || this.participantId === null || this.currentSample === null) {
      return;
    }
    try {
      await this.api.submitRating(
        this.participantId,
        this.currentSample.id,
        scores,
        this.expertise,
      );
    } catch (error) {
      if (error instanceof ApiError) {
        this.showStatus(`Rating rejected: ${error.message}`, "retry-prompt");
        return;
      }
      throw error;
    }
    this.ratingsSubmitted += 1;
    await this.loadNext();
  }

  private showStatus(message: string, className: string): void {
    this.statusEl.innerHTML = "";
    const note = document.createElement("p");
    note.className = className;
    note.textContent = message;
    this.statusEl.append(note);
  }
}
