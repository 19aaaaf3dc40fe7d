/**
 * Shared test data: the animal-sounds walkthrough, expressed purely in
 * wire-protocol terms (utterance scripts in, program snapshots out).
 */

import { ProgramJson } from "../src/protocol.js";

function soundConditional(animal: string): object {
  return {
    kind: "if",
    condition: { kind: "variable_equals", variable: "animal", literal: animal },
    then: [{ kind: "play_sound", sound: animal }],
    else: null,
  };
}

/** The finished animal-sounds program: a loop with four conditionals. */
export const ANIMAL_SOUNDS_PROGRAM = {
  format_version: 1,
  name: "animal sounds",
  actions: [
    {
      kind: "loop_until",
      condition: { kind: "until_user_says", word: "stop" },
      body: [
        { kind: "get_user_input", save_as: "animal" },
        soundConditional("dog"),
        soundConditional("cat"),
        soundConditional("horse"),
        soundConditional("cow"),
      ],
    },
  ],
} as unknown as ProgramJson;

/**
 * The first-session walkthrough: every utterance a first-time user says
 * to build animal-sounds from nothing, paired with the exact reply the
 * agent is specified to give.
 */
export const WALKTHROUGH: Array<{ say: string; expectReply: string }> = [
  {
    say: "Hey Parley, I want to make a game.",
    expectReply:
      "I didn't understand what you want to do. You can start making a program by saying 'create a program'.",
  },
  {
    say: "Okay, create a program.",
    expectReply: "What do you want to name the program?",
  },
  {
    say: "Animal Sounds",
    expectReply:
      "Okay! I created a program called animal sounds. What should it do first?",
  },
  {
    say: "Create a loop",
    expectReply:
      "What is the halting condition? You can say, until I say 'stop', or a number of times.",
  },
  {
    say: "Until I say 'stop'",
    expectReply:
      "Okay! I will keep going until you say 'stop'. What should happen inside the loop?",
  },
  {
    say: "Get user input and save it as animal",
    expectReply: "Okay, I will get user input and save it as animal. What's next?",
  },
  {
    say: "If animal is dog, play the dog sound",
    expectReply:
      "Okay! If animal is dog, I will play the dog sound. Should something happen when that is not the case?",
  },
  { say: "no", expectReply: "Okay. What's next?" },
  {
    say: "If animal is cat, play the cat sound",
    expectReply:
      "Okay! If animal is cat, I will play the cat sound. Should something happen when that is not the case?",
  },
  { say: "no", expectReply: "Okay. What's next?" },
  {
    say: "If animal is horse, play the horse sound",
    expectReply:
      "Okay! If animal is horse, I will play the horse sound. Should something happen when that is not the case?",
  },
  { say: "no", expectReply: "Okay. What's next?" },
  {
    say: "If animal is cow, play the cow sound",
    expectReply:
      "Okay! If animal is cow, I will play the cow sound. Should something happen when that is not the case?",
  },
  { say: "no", expectReply: "Okay. What's next?" },
  { say: "Close loop", expectReply: "Okay, the loop is closed. What's next?" },
  {
    say: "Done",
    expectReply:
      "You finished making the program animal sounds! Say, play animal sounds, to run it.",
  },
  { say: "Play Animal Sounds", expectReply: "Okay! Running animal sounds." },
];

/** Structural signature of the finished program (see shapeSignature). */
export const ANIMAL_SOUNDS_SHAPE =
  "loop_until[get_user_input if[play_sound] if[play_sound] if[play_sound] if[play_sound]]";
