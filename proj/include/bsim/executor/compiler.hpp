#pragma once

// Lowers method bodies to a small stack instruction set. Operands on the
// stack are datum ids; locals live in numbered slots.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bsim/frontend/resolver.hpp"

namespace bsim::executor {

enum class Op : std::uint8_t {
  PushLit,      // a: literal index
  PushNull,
  Load,         // a: slot
  Store,        // a: slot, b: type index of the slot's declared type (-1 none)
  GetField,     // a: name, b: declared type of the field (-1 unknown)
  PutField,     // a: name, b: declared type
  GetStatic,    // a: name, b: class/type name, c: declared type (-1 unknown)
  PutStatic,    // a: name, b: class name, c: declared type
  ArrayLoad,    // b: element type (-1 unknown)
  ArrayStore,   // b: element type
  ArrayLength,
  Binary,       // a: BinaryOp, b: static result type (-1 unknown)
  Unary,        // a: UnaryOp (Minus or Not), b: static result type
  Concat,
  Cast,         // a: primitive type name
  Refine,       // a: type index; refines an Unknown datum on top of stack
  Invoke,       // a: method index, b: argc, c: flags
  InvokeVirtual,// a: method index (declared-type target), b: argc, c: flags
  InvokeApi,    // a: signature text index ("T.m/k", T may be "?"), b: argc, c: flags
  NewObject,    // a: class index, b: argc, c: constructor method index (-1 none)
  NewApiObject, // a: type name, b: argc
  NewArray,     // a: element type name
  NewArrayInit, // a: element type name, b: element count
  Jump,         // a: target
  JumpIfFalse,  // a: target
  JumpIfTrue,   // a: target
  Short,        // a: 1 for &&, 0 for ||, b: symbolic target, c: end target
  LoopEnter,    // a: loop slot
  LoopCheck,    // a: loop slot, b: exit target, c: offset (1 for do-while); exits once count + c > n
  Dup,
  Dup2,
  DupX1,
  DupX2,
  Pop,
  Return,       // a: 1 when a value is returned
  EqNull,       // a: 1 for ==, 0 for !=; pops one operand
  ZeroField,    // a: name, b: primitive type; silent default on the object popped
  ZeroStatic,   // a: name, b: class name, c: primitive type
  TypeName,     // a: type name; pushes the memoized stand-in for a bare type name
};

enum InvokeFlag : int {
  kDiscard = 1,    // statement position: result unused
  kHasScope = 2,   // instance call: receiver below the arguments
};

struct Instr {
  Op op;
  int a = 0;
  int b = -1;
  int c = 0;
  int line = 0;
};

struct CompiledMethod {
  std::string signature;
  std::string name;
  int cls = -1;
  int member = -1;  // -1 for synthesised initialisers
  bool isStatic = false;
  bool returnsValue = false;
  int returnType = -1;  // type index
  std::vector<int> paramTypes;
  int params = 0;  // parameter slots, including `this`
  int slots = 0;
  int loops = 0;
  std::vector<Instr> code;
};

struct CompiledProgram {
  const frontend::ResolvedProgram* program = nullptr;
  std::vector<CompiledMethod> methods;
  std::vector<frontend::Literal> literals;
  std::vector<std::string> strings;  // names, signatures, type texts
  std::vector<int> staticInit;       // per class: method index (class declaration order)
  std::vector<int> implicitCtor;     // per class: method for `new C()` without a declared constructor
  std::map<std::pair<int, int>, int> byMember;  // (class, member) -> method index

  int intern(const std::string& s);
  const std::string& str(int i) const { return strings[i]; }
  // Runtime dispatch: most specific method `name`/arity for class `cls`.
  int dispatch(int cls, const std::string& name, std::size_t arity) const;
};

// Throws std::runtime_error for constructs the executor cannot model.
CompiledProgram compile_program(const frontend::ResolvedProgram& program);

// Human-readable listing, for debugging.
std::string disassemble(const CompiledProgram& cp, int method);

}  // namespace bsim::executor
